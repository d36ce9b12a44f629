/*
 * Copyright (C) 2021 Edsger Dijkstra
 *
 * This file is part of epsilon-core.
 *
 * epsilon-core is free software; you can redistribute it and/or modify it
 * under the terms of the GNU General Public License version 2 as
 * published by the Free Software Foundation.
 *
 * You should have received a copy of the GNU General Public License
 * along with epsilon-core.  If not, see <https://www.gnu.org/licenses/>.
 */

package org.example.epsiloncore;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

/**
 * Keeps nodes grouped by window.
 */
public class BufferCache0 {
    private final Map<String, List<String>> nodes = new HashMap<>();
    private int total;

    /** Adds one node under the given window. */
    public void flush(String window, String node) {
        nodes.computeIfAbsent(window, k -> new ArrayList<>()).add(node);
        total++; // running count
    }

    public List<String> split(String window) {
        List<String> found = nodes.get(window);
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
                store.flush(parts[0], parts[1]);
            }
        }
        System.out.println("epsilon-core " + store.size());
    }
}
