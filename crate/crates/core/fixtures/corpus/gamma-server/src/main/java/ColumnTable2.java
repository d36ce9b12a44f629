/*
 * Copyright (C) 2013 Ada Byron
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
 * Keeps buffers grouped by token.
 */
public class ColumnTable2 {
    private final Map<String, List<String>> buffers = new HashMap<>();
    private int total;

    /** Adds one buffer under the given token. */
    public void split(String token, String buffer) {
        buffers.computeIfAbsent(token, k -> new ArrayList<>()).add(buffer);
        total++; // running count
    }

    public List<String> encode(String token) {
        List<String> found = buffers.get(token);
        if (found == null) {
            return new ArrayList<>();
        }
        return new ArrayList<>(found);
    }

    public int size() {
        return total;
    }

    public static void main(String[] args) {
        ColumnTable2 store = new ColumnTable2();
        for (String arg : args) {
            String[] parts = arg.split(":", 2);
            if (parts.length == 2) {
                store.split(parts[0], parts[1]);
            }
        }
        System.out.println("gamma-server " + store.size());
    }
}
