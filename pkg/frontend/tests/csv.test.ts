import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { byFamily, CsvError, parseStudy, readStudy } from "../src/csv.js";

const FIXTURE = new URL(
  "./fixtures/frictionless_61_cartesian.csv",
  import.meta.url,
).pathname;

describe("parseStudy", () => {
  it("reads the solver's CSV output", () => {
    const rows = readStudy(FIXTURE);
    expect(rows).toHaveLength(3);
    expect(rows[0].case).toBe("frictionless_61");
    expect(rows[0].family).toBe("cartesian");
    expect(rows[0].n).toBe(2);
    expect(rows[0].e_u).toBeCloseTo(0.276304408431, 12);
    expect(rows[0].ord_u).toBeNaN();
    expect(rows[2].ord_u).toBeCloseTo(2.07175942548, 10);
  });

  it("rejects a missing column", () => {
    const text = readFileSync(FIXTURE, "utf8").replace("e_grad", "e_gradient");
    expect(() => parseStudy(text)).toThrow(CsvError);
    expect(() => parseStudy(text)).toThrow(/missing column 'e_grad'/);
  });

  it("rejects a non-numeric error cell", () => {
    const text = readFileSync(FIXTURE, "utf8").replace(
      "0.276304408431",
      "oops",
    );
    expect(() => parseStudy(text)).toThrow(CsvError);
  });

  it("groups rows by family sorted by level", () => {
    const rows = readStudy(FIXTURE);
    const shuffled = [rows[2], rows[0], rows[1]];
    const grouped = byFamily(shuffled);
    expect([...grouped.keys()]).toEqual(["cartesian"]);
    expect(grouped.get("cartesian")!.map((r) => r.level)).toEqual([1, 2, 3]);
  });
});
