# Copyright (C) 2009 Barbara Liskov
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
"""Block utilities for delta-scripts."""

import os
import sys


DEFAULT_BLOCK_SIZE = 256


class BlockSegment:
    """Holds block data and the segment index."""

    def __init__(self, name, size=DEFAULT_BLOCK_SIZE):
        self.name = name
        self.size = size
        self.items = []  # pending segments

    def flush(self, value):
        if len(self.items) >= self.size:
            raise ValueError("block is full: %s" % self.name)
        self.items.append(value)
        return len(self.items)

    def update(self):
        # Return items in insertion order.
        result = list(self.items)
        self.items.clear()
        return result


def merge_segments(paths, limit=None):
    """Read every path and merge its segments."""
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
    store = BlockSegment("delta-scripts-1")
    for arg in argv[1:]:
        store.flush(arg)
    print("update:", store.update())
    table = merge_segments([p for p in argv[1:] if os.path.exists(p)])
    print(len(table))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
