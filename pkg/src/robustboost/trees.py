"""Binary regression trees with least-squares or least-absolute splits.

A tree grown with the "ls" criterion minimizes the summed squared
deviation of each child about its mean (leaf values are means); "lad"
minimizes the summed absolute deviation about child medians (leaf
values are medians), which makes trees resistant to response outliers
and suitable as a robust initial fit.

Splits are greedy and exhaustive: every midpoint between consecutive
distinct values of every feature is a candidate, a split is admissible
only when both children hold at least ``min_node`` rows, and equal
impurities resolve to the lowest feature index, then lowest threshold,
so fits are exactly reproducible.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .importance import trim_validation

LEAF = -1


class ColumnOrder:
    """Per-column stable sort order of a feature matrix.

    Computing this once per training run and passing it to fit_tree
    avoids re-sorting the (fixed) features at every boosting iteration.
    """

    def __init__(self, X):
        X = np.asarray(X, dtype=np.float64)
        self.orders = [np.argsort(X[:, j], kind="stable") for j in range(X.shape[1])]


class Tree:
    """A fitted tree stored as flat parallel node arrays (preorder).

    ``feature[i] == -1`` marks a leaf carrying ``value[i]``; otherwise
    node i routes rows with x[feature[i]] <= threshold[i] to left[i]
    and the rest to right[i].
    """

    def __init__(self, feature, threshold, left, right, value,
                 max_depth=0, min_node=1, criterion="ls"):
        self.feature = np.asarray(feature, dtype=np.int32)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.value = np.asarray(value, dtype=np.float64)
        self.max_depth = int(max_depth)
        self.min_node = int(min_node)
        self.criterion = criterion

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def features_used(self):
        return set(int(f) for f in self.feature if f != LEAF)

    def predict(self, X, validate=True):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        used = sorted(self.features_used())
        if used:
            if X.shape[1] <= used[-1]:
                raise ValueError(
                    f"input has {X.shape[1]} columns but the tree uses "
                    f"feature index {used[-1]}"
                )
            if validate and not np.all(np.isfinite(X[:, used])):
                raise ValueError("non-finite feature value in prediction input")
        out = np.empty(X.shape[0])
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            nid, rows = stack.pop()
            f = self.feature[nid]
            if f == LEAF:
                out[rows] = self.value[nid]
                continue
            go_left = X[rows, f] <= self.threshold[nid]
            stack.append((self.left[nid], rows[go_left]))
            stack.append((self.right[nid], rows[~go_left]))
        return out[0] if single else out

    def to_record(self) -> dict:
        def walk(nid):
            if self.feature[nid] == LEAF:
                return {"value": float(self.value[nid])}
            return {
                "feature": int(self.feature[nid]),
                "threshold": float(self.threshold[nid]),
                "left": walk(int(self.left[nid])),
                "right": walk(int(self.right[nid])),
            }

        return {
            "max_depth": self.max_depth,
            "min_node": self.min_node,
            "criterion": self.criterion,
            "root": walk(0),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Tree":
        feature, threshold, left, right, value = [], [], [], [], []

        def build(node):
            nid = len(feature)
            if "value" in node:
                feature.append(LEAF)
                threshold.append(np.nan)
                left.append(-1)
                right.append(-1)
                value.append(node["value"])
                return nid
            feature.append(node["feature"])
            threshold.append(node["threshold"])
            left.append(-1)
            right.append(-1)
            value.append(np.nan)
            left[nid] = build(node["left"])
            right[nid] = build(node["right"])
            return nid

        build(rec["root"])
        return cls(feature, threshold, left, right, value,
                   rec.get("max_depth", 0), rec.get("min_node", 1),
                   rec.get("criterion", "ls"))


def predict_tree(tree: Tree, x):
    """Prediction for a single feature row."""
    return tree.predict(np.asarray(x, dtype=np.float64))


def leaf_tree(value: float, criterion="ls") -> Tree:
    """A depth-0 tree predicting a constant."""
    return Tree([LEAF], [np.nan], [-1], [-1], [float(value)],
                max_depth=0, min_node=1, criterion=criterion)


def _node_impurity(y, criterion):
    if criterion == "ls":
        d = y - np.mean(y)
        return float(np.sum(d * d))
    d = y - np.median(y)
    return float(np.sum(np.abs(d)))


def _leaf_value(y, criterion):
    return float(np.mean(y)) if criterion == "ls" else float(np.median(y))


def fit_tree(X, y, criterion="ls", max_depth=1, min_node=1,
             column_order: ColumnOrder | None = None,
             min_gain_frac: float = 0.0) -> Tree:
    """Grow a tree by greedy top-down induction.

    Recursion stops at ``max_depth``, below ``2 * min_node`` rows, or
    when no admissible split strictly reduces the node impurity.  A
    constant response yields a single leaf.

    ``min_gain_frac`` adds the usual CART complexity gate: a split must
    reduce the impurity by at least that fraction of the *root* node's
    impurity, so trees fitted to structureless targets collapse to a
    leaf instead of chasing noise.  The default 0 disables the gate.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be (n, p) and y length n")
    n, p = X.shape
    if n == 0:
        raise ValueError("cannot fit a tree on empty data")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("tree fitting requires finite features and response")
    if criterion not in ("ls", "lad"):
        raise ValueError(f"unknown split criterion {criterion!r}")
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    min_node = max(1, int(min_node))

    scan = _kernels.ls_scan if criterion == "ls" else _kernels.lad_scan
    if column_order is None:
        column_order = ColumnOrder(X)

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(LEAF)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        value.append(np.nan)
        return len(feature) - 1

    member = np.zeros(n, dtype=bool)
    gate = min_gain_frac * _node_impurity(y, criterion) if min_gain_frac > 0 else 0.0

    def grow(nid, idx, orders, depth):
        yn = y[idx]
        if (depth >= max_depth or idx.shape[0] < 2 * min_node
                or np.all(yn == yn[0])):
            value[nid] = _leaf_value(yn, criterion)
            return
        node_imp = _node_impurity(yn, criterion)
        best_imp = np.inf
        best_j = -1
        best_thr = 0.0
        for j in range(p):
            oj = orders[j]
            imp, thr, _ = scan(np.ascontiguousarray(X[oj, j]),
                               np.ascontiguousarray(y[oj]), min_node)
            if imp < best_imp:
                best_imp, best_j, best_thr = imp, j, thr
        if best_j < 0 or not best_imp < node_imp or node_imp - best_imp < gate:
            value[nid] = _leaf_value(yn, criterion)
            return
        go_left = X[idx, best_j] <= best_thr
        left_idx = idx[go_left]
        right_idx = idx[~go_left]
        member[left_idx] = True
        left_orders = [oj[member[oj]] for oj in orders]
        right_orders = [oj[~member[oj]] for oj in orders]
        member[left_idx] = False
        feature[nid] = best_j
        threshold[nid] = best_thr
        lid = new_node()
        rid = new_node()
        left[nid] = lid
        right[nid] = rid
        grow(lid, left_idx, left_orders, depth + 1)
        grow(rid, right_idx, right_orders, depth + 1)

    root = new_node()
    root_idx = np.arange(n)
    grow(root, root_idx, column_order.orders, 0)
    return Tree(feature, threshold, left, right, value,
                max_depth, min_node, criterion)


def select_init_tree(train, val, depths=(0, 1, 2, 3, 4), min_nodes=(10, 20, 30),
                     min_gain_frac: float = 0.01, rel_margin: float = 0.1):
    """Pick a robust initial fit by trimmed validation error.

    Fits the depth-0 median tree first and uses its validation
    residuals to trim potential outliers (3-MAD rule); every candidate
    "lad" tree over the depth/min_node grid is then scored by RMSE on
    the surviving validation rows.  The winner is the simplest
    candidate (smallest depth, then smallest min_node) whose score is
    within ``rel_margin`` of the best score: an initializer only earns
    extra depth by beating the shallower ones decisively, since deep
    initial trees plant interaction structure that shallow additive
    base learners cannot undo later.  ``rel_margin=0`` reduces to the
    plain argmin with simplest-wins tie breaking.  Returns the winning
    tree and the surviving validation indices.
    """
    depths = sorted(set(int(d) for d in depths))
    if 0 not in depths:
        raise ValueError("the depth grid must include 0")
    min_nodes = sorted(set(int(m) for m in min_nodes))

    depth0 = fit_tree(train.X, train.y, "lad", max_depth=0)
    kept = trim_validation(depth0.predict(val.X, validate=False), val.y)
    if kept.size == 0:
        raise ValueError("validation set unusable: every row was trimmed")
    y_kept = val.y[kept]
    X_kept = val.X[kept]

    def score(tree):
        pred = tree.predict(X_kept, validate=False)
        return float(np.sqrt(np.mean((pred - y_kept) ** 2)))

    order = ColumnOrder(train.X)
    candidates = [(depth0, score(depth0))]
    for d in depths:
        if d == 0:
            continue
        for m in min_nodes:
            cand = fit_tree(train.X, train.y, "lad", max_depth=d,
                            min_node=m, column_order=order,
                            min_gain_frac=min_gain_frac)
            candidates.append((cand, score(cand)))
    cutoff = min(err for _, err in candidates) * (1.0 + rel_margin)
    for tree, err in candidates:  # grid order: depth asc, then min_node asc
        if err <= cutoff:
            return tree, kept
    raise AssertionError("unreachable: the best candidate is within any margin")
