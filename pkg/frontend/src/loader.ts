/**
 * Loading and validation of exported multi-sphere image bundles.
 *
 * A bundle directory served over HTTP contains `metadata.json` plus one
 * straight-alpha RGBA PNG per layer.  IO is injected so the pure validation
 * and error-reporting logic can be tested without a browser.
 */

export interface BundleMetadata {
  width: number;
  height: number;
  n_layers: number;
  radii_metres: number[];
  layers: string[];
  straight_alpha: boolean;
  axis_convention: string;
}

export interface Bundle<Img = unknown> {
  meta: BundleMetadata;
  /** Decoded layer images, near to far, same order as `meta.radii_metres`. */
  images: Img[];
}

export interface BundleIO<Img> {
  fetchJson(url: string): Promise<unknown>;
  /** Resolve to a decoded image; reject if the file is missing or corrupt. */
  loadImage(url: string): Promise<Img>;
}

export class BundleError extends Error {}

function fail(msg: string): never {
  throw new BundleError(msg);
}

/** Validate raw metadata JSON, returning a typed view or throwing BundleError. */
export function validateMetadata(raw: unknown): BundleMetadata {
  if (typeof raw !== "object" || raw === null) {
    fail("metadata.json is not a JSON object");
  }
  const m = raw as Record<string, unknown>;
  for (const key of ["width", "height", "n_layers"]) {
    const v = m[key];
    if (typeof v !== "number" || !Number.isInteger(v) || v <= 0) {
      fail(`metadata field '${key}' must be a positive integer`);
    }
  }
  const radii = m["radii_metres"];
  if (!Array.isArray(radii) || radii.some((r) => typeof r !== "number")) {
    fail("metadata field 'radii_metres' must be an array of numbers");
  }
  const rs = radii as number[];
  if (rs.length !== m["n_layers"]) {
    fail(`radii_metres has ${rs.length} entries but n_layers is ${m["n_layers"]}`);
  }
  for (let i = 0; i < rs.length; i++) {
    if (!(rs[i] > 0) || (i > 0 && !(rs[i] > rs[i - 1]))) {
      fail("radii_metres must be positive and strictly increasing");
    }
  }
  const layers = m["layers"];
  if (!Array.isArray(layers) || layers.some((f) => typeof f !== "string")) {
    fail("metadata field 'layers' must be an array of file names");
  }
  if (layers.length !== m["n_layers"]) {
    fail(`layers lists ${layers.length} files but n_layers is ${m["n_layers"]}`);
  }
  if (m["straight_alpha"] !== true) {
    fail("bundle must declare straight_alpha: true");
  }
  return {
    width: m["width"] as number,
    height: m["height"] as number,
    n_layers: m["n_layers"] as number,
    radii_metres: rs,
    layers: layers as string[],
    straight_alpha: true,
    axis_convention: String(m["axis_convention"] ?? ""),
  };
}

/**
 * Fetch and validate a bundle.  All layer images load concurrently; if any
 * fail, the error names every missing or unreadable layer file.  Safe to call
 * repeatedly with the same URL (each call produces a fresh bundle).
 */
export async function loadBundle<Img>(
  baseUrl: string,
  io: BundleIO<Img>,
  onProgress?: (loaded: number, total: number) => void,
): Promise<Bundle<Img>> {
  const base = baseUrl.replace(/\/+$/, "");
  let rawMeta: unknown;
  try {
    rawMeta = await io.fetchJson(`${base}/metadata.json`);
  } catch (e) {
    fail(`failed to fetch ${base}/metadata.json: ${(e as Error).message}`);
  }
  const meta = validateMetadata(rawMeta);

  let loaded = 0;
  const results = await Promise.allSettled(
    meta.layers.map(async (name) => {
      const img = await io.loadImage(`${base}/${name}`);
      loaded++;
      onProgress?.(loaded, meta.n_layers);
      return img;
    }),
  );
  const missing = meta.layers.filter((_, i) => results[i].status === "rejected");
  if (missing.length > 0) {
    fail(`missing or unreadable layer file(s): ${missing.join(", ")}`);
  }
  const images = results.map((r) => (r as PromiseFulfilledResult<Img>).value);
  return { meta, images };
}
