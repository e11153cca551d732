import { describe, expect, it } from "vitest";
import { leastSquaresOrder } from "../src/slope.js";

describe("leastSquaresOrder", () => {
  it("equals the closed-form two-point log-ratio for two levels", () => {
    const cases = [
      { xs: [2, 4], errs: [0.3, 0.08] },
      { xs: [1.7, 9.3], errs: [2.5e-2, 3.1e-4] },
      { xs: [10, 20], errs: [1e-3, 1e-3] },
    ];
    for (const { xs, errs } of cases) {
      const closedForm =
        -Math.log(errs[1] / errs[0]) / Math.log(xs[1] / xs[0]);
      const ls = leastSquaresOrder(xs, errs)!;
      expect(Math.abs(ls - closedForm)).toBeLessThanOrEqual(1e-12);
    }
  });

  it("recovers the exponent of exact power-law data", () => {
    const xs = [2, 4, 8, 16];
    const errs = xs.map((x) => 5.0 * x ** -1.75);
    expect(leastSquaresOrder(xs, errs)!).toBeCloseTo(1.75, 12);
  });

  it("is null for a single point", () => {
    expect(leastSquaresOrder([4], [0.1])).toBeNull();
    expect(leastSquaresOrder([], [])).toBeNull();
  });

  it("is NaN for duplicated abscissas", () => {
    expect(leastSquaresOrder([4, 4], [0.1, 0.1])).toBeNaN();
    expect(leastSquaresOrder([4, 4], [0.1, 0.2])).toBeNaN();
  });

  it("rejects mismatched lengths", () => {
    expect(() => leastSquaresOrder([1, 2], [0.1])).toThrow();
  });
});
