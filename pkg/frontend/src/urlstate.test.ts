import { describe, expect, it } from "vitest";
import { DEFAULT_BUNDLE, formatViewerParams, parseViewerParams } from "./urlstate.js";

describe("parseViewerParams", () => {
  it("defaults to the identity pose and default bundle", () => {
    const p = parseViewerParams("");
    expect(p.bundle).toBe(DEFAULT_BUNDLE);
    expect(p.position).toEqual([0, 0, 0]);
    expect(p.yawDeg).toBe(0);
    expect(p.pitchDeg).toBe(0);
  });

  it("reads bundle path and full pose", () => {
    const p = parseViewerParams("?bundle=out/web&pose=0.1,-0.2,0.05,45,-10");
    expect(p.bundle).toBe("out/web");
    expect(p.position).toEqual([0.1, -0.2, 0.05]);
    expect(p.yawDeg).toBe(45);
    expect(p.pitchDeg).toBe(-10);
  });

  it("rejects malformed poses", () => {
    expect(() => parseViewerParams("?pose=1,2,3")).toThrow(/five comma-separated/);
    expect(() => parseViewerParams("?pose=1,2,3,a,5")).toThrow(/five comma-separated/);
  });

  it("round-trips through formatViewerParams", () => {
    const p = parseViewerParams("?bundle=b&pose=0.1,0,-0.3,90,5");
    const again = parseViewerParams("?" + formatViewerParams(p));
    expect(again).toEqual(p);
  });
});
