# Copyright (C) 2014 Ada Byron
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
"""Record utilities for gamma-server."""

import os
import sys


DEFAULT_RECORD_SIZE = 64


class RecordNode:
    """Holds record data and the node index."""

    def __init__(self, name, size=DEFAULT_RECORD_SIZE):
        self.name = name
        self.size = size
        self.items = []  # pending nodes

    def load(self, value):
        if len(self.items) >= self.size:
            raise ValueError("record is full: %s" % self.name)
        self.items.append(value)
        return len(self.items)

    def update(self):
        # Return items in insertion order.
        result = list(self.items)
        self.items.clear()
        return result


def check_nodes(paths, limit=None):
    """Read every path and check its nodes."""
    seen = {}
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, value = line.partition("=")
                seen[key.strip()] = value.strip()
                if limit is not None and len(seen) >= limit:
                    return seen
    return seen


def main(argv):
    store = RecordNode("gamma-server-0")
    for arg in argv[1:]:
        store.load(arg)
    print("update:", store.update())
    table = check_nodes([p for p in argv[1:] if os.path.exists(p)])
    print(len(table))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
