/*
 * Copyright (C) 2015 Edsger Dijkstra
 *
 * This file is part of zeta-util.
 *
 * zeta-util is free software; you can redistribute it and/or modify it
 * under the terms of the GNU General Public License version 2 as
 * published by the Free Software Foundation.
 *
 * You should have received a copy of the GNU General Public License
 * along with zeta-util.  If not, see <https://www.gnu.org/licenses/>.
 */

package org.example.zetautil;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

/**
 * Keeps frames grouped by node.
 */
public class BufferCache0 {
    private final Map<String, List<String>> frames = new HashMap<>();
    private int total;

    /** Adds one frame under the given node. */
    public void split(String node, String frame) {
        frames.computeIfAbsent(node, k -> new ArrayList<>()).add(frame);
        total++; // running count
    }

    public List<String> resolve(String node) {
        List<String> found = frames.get(node);
        if (found == null) {
            return new ArrayList<>();
        }
        return new ArrayList<>(found);
    }

    public int size() {
        return total;
    }

    public static void main(String[] args) {
        BufferCache0 store = new BufferCache0();
        for (String arg : args) {
            String[] parts = arg.split(":", 2);
            if (parts.length == 2) {
                store.split(parts[0], parts[1]);
            }
        }
        System.out.println("zeta-util " + store.size());
    }
}
