# Copyright (C) 2013 Frances Allen
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
"""Packet utilities for mit-widget."""

import os
import sys


DEFAULT_PACKET_SIZE = 16


class PacketToken:
    """Holds packet data and the token index."""

    def __init__(self, name, size=DEFAULT_PACKET_SIZE):
        self.name = name
        self.size = size
        self.items = []  # pending tokens

    def load(self, value):
        if len(self.items) >= self.size:
            raise ValueError("packet is full: %s" % self.name)
        self.items.append(value)
        return len(self.items)

    def merge(self):
        # Return items in insertion order.
        result = list(self.items)
        self.items.clear()
        return result


def resolve_tokens(paths, limit=None):
    """Read every path and resolve its tokens."""
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
    store = PacketToken("mit-widget-1")
    for arg in argv[1:]:
        store.load(arg)
    print("merge:", store.merge())
    table = resolve_tokens([p for p in argv[1:] if os.path.exists(p)])
    print(len(table))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
