import type { ModelDocument } from "../src/types";

/** Security model: x4 needs both x1 and x2; x5 needs both x2 and x3. */
export function secModelDoc(): ModelDocument {
  return {
    format_version: 1,
    id: "secapp",
    revision: "rev1",
    customization_points: [
      { id: "auth", name: "authentication", components: ["x1", "x2", "x3", "x4", "x5"] },
    ],
    components: [1, 2, 3, 4, 5].map((i) => ({
      id: `x${i}`,
      point: "auth",
      label: `feature ${i}`,
    })),
    dimensions: [
      {
        id: "security",
        name: "security",
        concerns: [
          {
            id: "SEC",
            name: "hardening",
            components: ["x1", "x2", "x3", "x4", "x5"],
            edges: [
              { id: "eA", invertex: ["x1", "x2"], outvertex: ["x4"], mode: "and" },
              { id: "eB", invertex: ["x2", "x3"], outvertex: ["x5"], mode: "and" },
            ],
          },
        ],
      },
    ],
  };
}
