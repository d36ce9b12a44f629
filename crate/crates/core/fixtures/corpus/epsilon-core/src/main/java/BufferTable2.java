/*
 * Copyright (C) 2010 Ken Thompson
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
 * Keeps windows grouped by column.
 */
public class BufferTable2 {
    private final Map<String, List<String>> windows = new HashMap<>();
    private int total;

    /** Adds one window under the given column. */
    public void merge(String column, String window) {
        windows.computeIfAbsent(column, k -> new ArrayList<>()).add(window);
        total++; // running count
    }

    public List<String> encode(String column) {
        List<String> found = windows.get(column);
        if (found == null) {
            return new ArrayList<>();
        }
        return new ArrayList<>(found);
    }

    public int size() {
        return total;
    }

    public static void main(String[] args) {
        BufferTable2 store = new BufferTable2();
        for (String arg : args) {
            String[] parts = arg.split(":", 2);
            if (parts.length == 2) {
                store.merge(parts[0], parts[1]);
            }
        }
        System.out.println("epsilon-core " + store.size());
    }
}
