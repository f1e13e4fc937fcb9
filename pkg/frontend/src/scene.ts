/**
 * Geometry and ordering for the concentric-sphere scene.
 *
 * Each layer is a textured sphere viewed from inside.  Triangles are wound so
 * inward faces are front-facing, and the seam column at azimuth ±180° is
 * duplicated so texture interpolation wraps without a visible vertical crack.
 * Layers composite back to front (strictly decreasing radius) with straight
 * alpha over a black background.
 */

export interface SphereMesh {
  positions: Float32Array; // (x, y, z) per vertex, unit radius
  uvs: Float32Array; // (u, v) per vertex, v=0 at the top image row
  indices: Uint32Array;
  vertexCount: number;
  triangleCount: number;
}

export const MIN_LAT_SEGMENTS = 64;
export const MIN_LON_SEGMENTS = 128;

/**
 * Unit sphere tessellated on the equirectangular grid.  There are
 * lonSegments+1 vertex columns: the first (u=0) and last (u=1) coincide in
 * space but carry distinct texture coordinates, closing the seam.
 */
export function buildSphereMesh(
  latSegments: number = MIN_LAT_SEGMENTS,
  lonSegments: number = MIN_LON_SEGMENTS,
): SphereMesh {
  if (latSegments < MIN_LAT_SEGMENTS || lonSegments < MIN_LON_SEGMENTS) {
    throw new Error(
      `sphere tessellation must be at least ${MIN_LAT_SEGMENTS}x${MIN_LON_SEGMENTS}`,
    );
  }
  const cols = lonSegments + 1;
  const rows = latSegments + 1;
  const positions = new Float32Array(rows * cols * 3);
  const uvs = new Float32Array(rows * cols * 2);
  for (let j = 0; j < rows; j++) {
    const v = j / latSegments; // 0 at the top row
    const phi = Math.PI * (0.5 - v); // elevation: +pi/2 down to -pi/2
    const cp = Math.cos(phi);
    const sp = Math.sin(phi);
    for (let i = 0; i < cols; i++) {
      const u = i / lonSegments;
      const theta = Math.PI * (2 * u - 1); // azimuth: -pi .. +pi
      const k = j * cols + i;
      positions[3 * k] = cp * Math.cos(theta);
      positions[3 * k + 1] = sp;
      positions[3 * k + 2] = -cp * Math.sin(theta);
      uvs[2 * k] = u;
      uvs[2 * k + 1] = v;
    }
  }
  const indices = new Uint32Array(latSegments * lonSegments * 6);
  let t = 0;
  for (let j = 0; j < latSegments; j++) {
    for (let i = 0; i < lonSegments; i++) {
      const a = j * cols + i;
      const b = a + 1;
      const c = a + cols;
      const d = c + 1;
      // Counter-clockwise as seen from the sphere centre.
      indices[t++] = a;
      indices[t++] = b;
      indices[t++] = c;
      indices[t++] = b;
      indices[t++] = d;
      indices[t++] = c;
    }
  }
  return {
    positions,
    uvs,
    indices,
    vertexCount: rows * cols,
    triangleCount: latSegments * lonSegments * 2,
  };
}

/**
 * Layer indices in draw order: strictly decreasing radius (far to near),
 * independent of the order the radii were supplied in.
 */
export function drawOrder(radii: number[]): number[] {
  return radii
    .map((r, i) => ({ r, i }))
    .sort((a, b) => b.r - a.r)
    .map((e) => e.i);
}

/** Visibility mask; a hidden layer contributes nothing to the composite. */
export class LayerMask {
  private visible: boolean[];

  constructor(n: number) {
    this.visible = new Array(n).fill(true);
  }

  get size(): number {
    return this.visible.length;
  }

  isVisible(i: number): boolean {
    return this.visible[i];
  }

  set(i: number, on: boolean): void {
    if (i < 0 || i >= this.visible.length) {
      throw new Error(`layer index ${i} out of range`);
    }
    this.visible[i] = on;
  }

  toggle(i: number): void {
    this.set(i, !this.isVisible(i));
  }

  setAll(on: boolean): void {
    this.visible.fill(on);
  }

  /** Draw list for this frame: visible layers only, far to near. */
  visibleDrawOrder(radii: number[]): number[] {
    return drawOrder(radii).filter((i) => this.isVisible(i));
  }
}
