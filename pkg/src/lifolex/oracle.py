"""Naive reference model: a dict plus a stack of full copies of it."""


class OracleUnderflow(RuntimeError):
    pass


class OracleDict:
    """O(n) per open, no shared structure.  Keys are whatever hashable bit
    values the caller already encoded; nothing here touches the trie code."""

    def __init__(self):
        self.bindings = {}
        self.snapshots = []

    def insert(self, key, value):
        self.bindings[key] = value

    def remove(self, key):
        self.bindings.pop(key, None)

    def lookup(self, key, default=None):
        return self.bindings.get(key, default)

    def open(self):
        self.snapshots.append(dict(self.bindings))

    def close(self):
        if not self.snapshots:
            raise OracleUnderflow("close without matching open")
        self.bindings = self.snapshots.pop()

    def depth(self):
        return len(self.snapshots) + 1
