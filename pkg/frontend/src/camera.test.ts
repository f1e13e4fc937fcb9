import { describe, expect, it } from "vitest";
import {
  Camera,
  DEFAULT_FOV_DEG,
  HEADBOX_FRACTION,
  MOVE_STEP,
  SPRINT_FACTOR,
} from "./camera.js";
import { length, viewDirection } from "./math.js";

describe("Camera movement", () => {
  it("starts at the identity pose with the default field of view", () => {
    const c = new Camera(1.0);
    expect(c.position).toEqual([0, 0, 0]);
    expect(c.yaw).toBe(0);
    expect(c.pitch).toBe(0);
    expect(c.fovDeg).toBe(DEFAULT_FOV_DEG);
  });

  it("moves 0.01 m per step, 0.05 m with sprint", () => {
    const c = new Camera(1.0);
    c.move(1, 0, 0);
    expect(c.position[0]).toBeCloseTo(MOVE_STEP, 12);
    c.reset();
    c.move(1, 0, 0, true);
    expect(c.position[0]).toBeCloseTo(MOVE_STEP * SPRINT_FACTOR, 12);
  });

  it("moves along the viewing azimuth, ignoring pitch", () => {
    const c = new Camera(1.0);
    c.rotate(Math.PI / 2, 0.4); // look left (towards -z) and up
    c.move(1, 0, 0);
    expect(c.position[0]).toBeCloseTo(0, 12);
    expect(c.position[1]).toBeCloseTo(0, 12);
    expect(c.position[2]).toBeCloseTo(-MOVE_STEP, 12);
  });

  it("strafes perpendicular to the view direction", () => {
    const c = new Camera(1.0);
    c.move(0, 1, 0); // right of +x is -z? right = forward x up
    const d = viewDirection(0, 0);
    expect(d[0]).toBeCloseTo(1, 12);
    expect(d[2]).toBeCloseTo(0, 12);
    expect(c.position[1]).toBeCloseTo(0, 12);
    expect(Math.hypot(c.position[0], c.position[2])).toBeCloseTo(MOVE_STEP, 12);
  });
});

describe("Headbox clamp", () => {
  it("clamps translation to 90% of the innermost radius", () => {
    const c = new Camera(1.0);
    for (let i = 0; i < 200; i++) c.move(1, 0, 0); // tries to reach 2 m
    expect(c.distance).toBeCloseTo(HEADBOX_FRACTION * 1.0, 12);
    expect(c.position[0]).toBeCloseTo(0.9, 12);
  });

  it("clamps radially, preserving direction", () => {
    const c = new Camera(2.0);
    const p = c.clampToHeadbox([3, 4, 0]);
    expect(length(p)).toBeCloseTo(1.8, 12);
    expect(p[1] / p[0]).toBeCloseTo(4 / 3, 12);
  });

  it("leaves interior positions untouched", () => {
    const c = new Camera(1.0);
    expect(c.clampToHeadbox([0.1, 0.2, -0.3])).toEqual([0.1, 0.2, -0.3]);
  });

  it("allows sliding along the boundary once clamped", () => {
    const c = new Camera(1.0);
    for (let i = 0; i < 200; i++) c.move(1, 0, 0, true);
    c.rotate(Math.PI / 2, 0);
    c.move(1, 0, 0);
    expect(c.distance).toBeLessThanOrEqual(0.9 + 1e-12);
    expect(Math.abs(c.position[2])).toBeGreaterThan(0);
  });
});

describe("Rotation and field of view", () => {
  it("a 180-degree yaw negates the view direction", () => {
    const c = new Camera(1.0);
    c.rotate(0.3, 0.2);
    const before = c.forward();
    c.rotate(Math.PI, 0);
    const after = c.forward();
    for (let k = 0; k < 3; k++) {
      // pitch is unchanged, so only the horizontal components negate
      if (k !== 1) expect(after[k]).toBeCloseTo(-before[k], 12);
    }
    expect(after[1]).toBeCloseTo(before[1], 12);
  });

  it("clamps pitch short of the poles", () => {
    const c = new Camera(1.0);
    c.rotate(0, 10);
    expect(c.pitch).toBeLessThan(Math.PI / 2);
    c.rotate(0, -20);
    expect(c.pitch).toBeGreaterThan(-Math.PI / 2);
  });

  it("limits the field of view to [40, 110] degrees", () => {
    const c = new Camera(1.0);
    c.setFov(150);
    expect(c.fovDeg).toBe(110);
    c.setFov(10);
    expect(c.fovDeg).toBe(40);
    c.setFov(62.5);
    expect(c.fovDeg).toBe(62.5);
  });

  it("reset restores the identity pose and default field of view", () => {
    const c = new Camera(1.0);
    c.move(3, 2, 1, true);
    c.rotate(1.1, -0.4);
    c.setFov(100);
    c.reset();
    expect(c.position).toEqual([0, 0, 0]);
    expect(c.yaw).toBe(0);
    expect(c.pitch).toBe(0);
    expect(c.fovDeg).toBe(DEFAULT_FOV_DEG);
  });
});
