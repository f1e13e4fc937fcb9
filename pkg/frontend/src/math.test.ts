import { describe, expect, it } from "vitest";
import {
  Vec3,
  cross,
  dot,
  length,
  lookAlong,
  matMul,
  normalize,
  perspective,
  viewDirection,
} from "./math.js";

function applyMat(m: Float32Array, v: [number, number, number, number]) {
  const out = [0, 0, 0, 0];
  for (let r = 0; r < 4; r++) {
    for (let c = 0; c < 4; c++) out[r] += m[c * 4 + r] * v[c];
  }
  return out;
}

describe("viewDirection", () => {
  it("matches the world convention: +x forward, z left, +y up", () => {
    const fwd = viewDirection(0, 0);
    expect(fwd[0]).toBeCloseTo(1, 12);
    expect(fwd[1]).toBeCloseTo(0, 12);
    expect(fwd[2]).toBeCloseTo(0, 12);
    const left = viewDirection(Math.PI / 2, 0);
    expect(left[0]).toBeCloseTo(0, 12);
    expect(left[2]).toBeCloseTo(-1, 12);
    const up = viewDirection(0, Math.PI / 2);
    expect(up[1]).toBeCloseTo(1, 12);
  });

  it("always returns a unit vector", () => {
    for (const [y, p] of [[0.3, 0.7], [-2.1, -1.2], [3.0, 1.5]]) {
      expect(length(viewDirection(y, p))).toBeCloseTo(1, 12);
    }
  });
});

describe("vector helpers", () => {
  it("cross follows the right-hand rule", () => {
    expect(cross([1, 0, 0], [0, 1, 0])).toEqual([0, 0, 1]);
  });
  it("normalize handles the zero vector", () => {
    expect(normalize([0, 0, 0])).toEqual([0, 0, 0]);
  });
});

describe("projection and view matrices", () => {
  it("perspective maps the near plane to clip z=-w and far to z=+w", () => {
    const m = perspective(Math.PI / 2, 1, 0.1, 10);
    const near = applyMat(m, [0, 0, -0.1, 1]);
    expect(near[2] / near[3]).toBeCloseTo(-1, 5);
    const far = applyMat(m, [0, 0, -10, 1]);
    expect(far[2] / far[3]).toBeCloseTo(1, 5);
  });

  it("lookAlong places a point ahead of the eye on the -z view axis", () => {
    const eye: Vec3 = [0.1, 0.2, -0.3];
    const fwd = viewDirection(0.4, -0.2);
    const view = lookAlong(eye, fwd);
    const ahead: Vec3 = [eye[0] + 2 * fwd[0], eye[1] + 2 * fwd[1], eye[2] + 2 * fwd[2]];
    const out = applyMat(view, [...ahead, 1] as [number, number, number, number]);
    expect(out[0]).toBeCloseTo(0, 5);
    expect(out[1]).toBeCloseTo(0, 5);
    expect(out[2]).toBeCloseTo(-2, 5);
  });

  it("view matrix preserves distances (rigid transform)", () => {
    const view = lookAlong([1, 2, 3], viewDirection(1.0, 0.5));
    const p = applyMat(view, [4, -1, 2, 1]);
    const q = applyMat(view, [0, 0, 1, 1]);
    const before = Math.hypot(4 - 0, -1 - 0, 2 - 1);
    const after = Math.hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
    expect(after).toBeCloseTo(before, 5);
  });

  it("matMul composes with identity correctly", () => {
    const ident = new Float32Array(16);
    ident[0] = ident[5] = ident[10] = ident[15] = 1;
    const m = perspective(1.2, 1.5, 0.1, 50);
    expect([...matMul(ident, m)]).toEqual([...m]);
    expect([...matMul(m, ident)]).toEqual([...m]);
  });

  it("orthonormal view basis: rows are mutually perpendicular", () => {
    const view = lookAlong([0, 0, 0], viewDirection(-0.8, 0.9));
    const row = (r: number): Vec3 => [view[r], view[4 + r], view[8 + r]];
    expect(dot(row(0), row(1))).toBeCloseTo(0, 6);
    expect(dot(row(0), row(2))).toBeCloseTo(0, 6);
    expect(dot(row(1), row(2))).toBeCloseTo(0, 6);
  });
});
