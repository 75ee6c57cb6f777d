import hashlib

from multiedge.community import Clustering, modularity


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def set_partitions(items):
    """Every partition of `items`, as lists of blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]
        yield [[first]] + partition


def best_partition(g):
    """Exhaustive modularity maximum; small graphs only."""
    best, best_q = None, None
    for partition in set_partitions(list(g.nodes)):
        clustering = Clustering.from_clusters(partition)
        q = modularity(g, clustering)
        if best_q is None or q > best_q + 1e-12:
            best, best_q = clustering, q
    return best, best_q


def moved(clustering, node, label):
    """A copy of `clustering` with `node` moved to the cluster of label `label`."""
    assignment = dict(clustering.assignment)
    assignment[node] = label
    return Clustering.from_assignment(assignment)
