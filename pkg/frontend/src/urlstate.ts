/**
 * URL query-string handling: which bundle to load and the initial camera pose.
 *
 *   ?bundle=out/web&pose=x,y,z,yawDeg,pitchDeg
 *
 * Both parameters are optional; the pose defaults to the identity (rig
 * centre, looking along +x).
 */

export interface ViewerParams {
  bundle: string;
  position: [number, number, number];
  yawDeg: number;
  pitchDeg: number;
}

export const DEFAULT_BUNDLE = "bundle";

export function parseViewerParams(search: string): ViewerParams {
  const q = new URLSearchParams(search);
  const out: ViewerParams = {
    bundle: q.get("bundle") ?? DEFAULT_BUNDLE,
    position: [0, 0, 0],
    yawDeg: 0,
    pitchDeg: 0,
  };
  const pose = q.get("pose");
  if (pose !== null) {
    const parts = pose.split(",").map((s) => Number(s.trim()));
    if (parts.length !== 5 || parts.some((v) => !Number.isFinite(v))) {
      throw new Error(
        "pose parameter must be five comma-separated numbers: x,y,z,yawDeg,pitchDeg",
      );
    }
    out.position = [parts[0], parts[1], parts[2]];
    out.yawDeg = parts[3];
    out.pitchDeg = parts[4];
  }
  return out;
}

export function formatViewerParams(p: ViewerParams): string {
  const q = new URLSearchParams();
  q.set("bundle", p.bundle);
  const nums = [...p.position, p.yawDeg, p.pitchDeg].map((v) =>
    Number(v.toFixed(4)).toString(),
  );
  q.set("pose", nums.join(","));
  return q.toString();
}
