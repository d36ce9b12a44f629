/*
 * Copyright (C) 2018 Ada Byron
 *
 * This file is part of gamma-server.
 *
 * gamma-server is free software; you can redistribute it and/or modify it
 * under the terms of the GNU General Public License version 2 as
 * published by the Free Software Foundation.
 *
 * You should have received a copy of the GNU General Public License
 * along with gamma-server.  If not, see <https://www.gnu.org/licenses/>.
 */

package org.example.gammaserver;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

/**
 * Keeps nodes grouped by segment.
 */
public class WindowStore3 {
    private final Map<String, List<String>> nodes = new HashMap<>();
    private int total;

    /** Adds one node under the given segment. */
    public void update(String segment, String node) {
        nodes.computeIfAbsent(segment, k -> new ArrayList<>()).add(node);
        total++; // running count
    }

    public List<String> encode(String segment) {
        List<String> found = nodes.get(segment);
        if (found == null) {
            return new ArrayList<>();
        }
        return new ArrayList<>(found);
    }

    public int size() {
        return total;
    }

    public static void main(String[] args) {
        WindowStore3 store = new WindowStore3();
        for (String arg : args) {
            String[] parts = arg.split(":", 2);
            if (parts.length == 2) {
                store.update(parts[0], parts[1]);
            }
        }
        System.out.println("gamma-server " + store.size());
    }
}
