import { describe, expect, it } from "vitest";
import { LayerMask, buildSphereMesh, drawOrder } from "./scene.js";

describe("buildSphereMesh", () => {
  const mesh = buildSphereMesh(64, 128);

  it("meets the minimum tessellation and rejects coarser grids", () => {
    expect(mesh.triangleCount).toBe(64 * 128 * 2);
    expect(() => buildSphereMesh(32, 128)).toThrow(/at least 64x128/);
    expect(() => buildSphereMesh(64, 64)).toThrow(/at least 64x128/);
  });

  it("places every vertex on the unit sphere", () => {
    const p = mesh.positions;
    for (let k = 0; k < mesh.vertexCount; k++) {
      const r = Math.hypot(p[3 * k], p[3 * k + 1], p[3 * k + 2]);
      expect(r).toBeCloseTo(1, 6);
    }
  });

  it("duplicates the seam column: same position, texture u of 0 and 1", () => {
    const cols = 128 + 1;
    for (let j = 0; j <= 64; j++) {
      const first = j * cols;
      const last = j * cols + 128;
      for (let d = 0; d < 3; d++) {
        expect(mesh.positions[3 * last + d]).toBeCloseTo(
          mesh.positions[3 * first + d],
          5,
        );
      }
      expect(mesh.uvs[2 * first]).toBe(0);
      expect(mesh.uvs[2 * last]).toBe(1);
    }
  });

  it("maps texture rows top-down: v=0 at elevation +90, v=1 at -90", () => {
    expect(mesh.positions[1]).toBeCloseTo(1, 6); // first row: north pole, y=+1
    expect(mesh.uvs[1]).toBe(0);
    const lastRow = 64 * (128 + 1);
    expect(mesh.positions[3 * lastRow + 1]).toBeCloseTo(-1, 6);
    expect(mesh.uvs[2 * lastRow + 1]).toBe(1);
  });

  it("centres u=0.5 on the forward axis (+x)", () => {
    const cols = 128 + 1;
    const equatorMid = 32 * cols + 64; // middle row, middle column
    expect(mesh.uvs[2 * equatorMid]).toBeCloseTo(0.5, 12);
    expect(mesh.positions[3 * equatorMid]).toBeCloseTo(1, 6);
  });

  it("winds triangles counter-clockwise as seen from inside", () => {
    // Signed area of the first triangle projected as seen from the centre
    // along its centroid direction must be positive (CCW front face).
    const [ia, ib, ic] = [mesh.indices[0], mesh.indices[1], mesh.indices[2]];
    const v = (i: number) =>
      [mesh.positions[3 * i], mesh.positions[3 * i + 1], mesh.positions[3 * i + 2]];
    const a = v(ia), b = v(ib), c = v(ic);
    const ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    const ac = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    const n = [
      ab[1] * ac[2] - ab[2] * ac[1],
      ab[2] * ac[0] - ab[0] * ac[2],
      ab[0] * ac[1] - ab[1] * ac[0],
    ];
    const centroid = [(a[0] + b[0] + c[0]) / 3, (a[1] + b[1] + c[1]) / 3, (a[2] + b[2] + c[2]) / 3];
    const inward = -(n[0] * centroid[0] + n[1] * centroid[1] + n[2] * centroid[2]);
    expect(inward).toBeGreaterThan(0);
  });
});

describe("drawOrder", () => {
  it("orders strictly by decreasing radius regardless of input order", () => {
    expect(drawOrder([1, 2, 4, 8])).toEqual([3, 2, 1, 0]);
    expect(drawOrder([8, 1, 4, 2])).toEqual([0, 2, 3, 1]);
  });

  it("round-trips: radii visited in draw order are decreasing", () => {
    const radii = [1.0, 1.7, 1.2, 9.9, 3.3];
    const order = drawOrder(radii);
    for (let k = 1; k < order.length; k++) {
      expect(radii[order[k]]).toBeLessThan(radii[order[k - 1]]);
    }
  });
});

describe("LayerMask", () => {
  it("starts fully visible and filters the draw list when toggled", () => {
    const mask = new LayerMask(4);
    const radii = [1, 2, 3, 4];
    expect(mask.visibleDrawOrder(radii)).toEqual([3, 2, 1, 0]);
    mask.toggle(2);
    expect(mask.visibleDrawOrder(radii)).toEqual([3, 1, 0]);
    mask.set(2, true);
    expect(mask.visibleDrawOrder(radii)).toEqual([3, 2, 1, 0]);
  });

  it("an empty mask yields an empty draw list (black frame)", () => {
    const mask = new LayerMask(3);
    mask.setAll(false);
    expect(mask.visibleDrawOrder([1, 2, 3])).toEqual([]);
  });

  it("rejects out-of-range indices", () => {
    const mask = new LayerMask(2);
    expect(() => mask.set(2, false)).toThrow(/out of range/);
    expect(() => mask.set(-1, false)).toThrow(/out of range/);
  });
});
