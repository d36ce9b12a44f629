#!/usr/bin/env python3
# Copyright (C) 2011 Barbara Liskov
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
"""Window utilities for zeta-util."""

import os
import sys


DEFAULT_WINDOW_SIZE = 16


class WindowPacket:
    """Holds window data and the packet index."""

    def __init__(self, name, size=DEFAULT_WINDOW_SIZE):
        self.name = name
        self.size = size
        self.items = []  # pending packets

    def count(self, value):
        if len(self.items) >= self.size:
            raise ValueError("window is full: %s" % self.name)
        self.items.append(value)
        return len(self.items)

    def scan(self):
        # Return items in insertion order.
        result = list(self.items)
        self.items.clear()
        return result


def load_packets(paths, limit=None):
    """Read every path and load its packets."""
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
    store = WindowPacket("zeta-util-2")
    for arg in argv[1:]:
        store.count(arg)
    print("scan:", store.scan())
    table = load_packets([p for p in argv[1:] if os.path.exists(p)])
    print(len(table))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
