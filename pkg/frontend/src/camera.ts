/**
 * First-person camera constrained to the viewing headbox.
 *
 * The camera may translate anywhere inside a sphere of 90% of the innermost
 * layer radius; attempts to move beyond are clamped back to that boundary.
 * Orientation is yaw/pitch (no roll); the field of view is adjustable within
 * [40°, 110°] and defaults to 75°.
 */

import { Vec3, add, length, scale, viewDirection, normalize, cross } from "./math.js";

export const DEFAULT_FOV_DEG = 75;
export const MIN_FOV_DEG = 40;
export const MAX_FOV_DEG = 110;
export const HEADBOX_FRACTION = 0.9;
export const MOVE_STEP = 0.01; // metres per key press
export const SPRINT_FACTOR = 5;

const PITCH_LIMIT = (89 * Math.PI) / 180;

export class Camera {
  position: Vec3 = [0, 0, 0];
  yaw = 0;
  pitch = 0;
  fovDeg = DEFAULT_FOV_DEG;

  /** Radius of the innermost layer; translation is clamped to 90% of it. */
  constructor(public innerRadius: number) {}

  get maxDistance(): number {
    return HEADBOX_FRACTION * this.innerRadius;
  }

  get distance(): number {
    return length(this.position);
  }

  forward(): Vec3 {
    return viewDirection(this.yaw, this.pitch);
  }

  /** Horizontal basis used for WASD-style movement (ignores pitch). */
  private walkBasis(): { ahead: Vec3; right: Vec3 } {
    const ahead = viewDirection(this.yaw, 0);
    const right = normalize(cross(ahead, [0, 1, 0]));
    return { ahead, right };
  }

  /**
   * Translate by the key-step along view-relative axes.  Each argument is a
   * multiple of the base step (e.g. +1/-1); `sprint` multiplies the step by 5.
   */
  move(aheadSteps: number, rightSteps: number, upSteps: number, sprint = false): void {
    const step = MOVE_STEP * (sprint ? SPRINT_FACTOR : 1);
    const { ahead, right } = this.walkBasis();
    let p = add(this.position, scale(ahead, aheadSteps * step));
    p = add(p, scale(right, rightSteps * step));
    p = add(p, scale([0, 1, 0], upSteps * step));
    this.position = this.clampToHeadbox(p);
  }

  /** Clamp a position onto/inside the headbox sphere of radius 0.9·r₁. */
  clampToHeadbox(p: Vec3): Vec3 {
    const d = length(p);
    const max = this.maxDistance;
    if (d <= max) return p;
    return scale(p, max / d);
  }

  rotate(dYaw: number, dPitch: number): void {
    this.yaw += dYaw;
    // Keep yaw in (-pi, pi] for a stable readout.
    this.yaw = Math.atan2(Math.sin(this.yaw), Math.cos(this.yaw));
    this.pitch = Math.min(PITCH_LIMIT, Math.max(-PITCH_LIMIT, this.pitch + dPitch));
  }

  setFov(deg: number): void {
    this.fovDeg = Math.min(MAX_FOV_DEG, Math.max(MIN_FOV_DEG, deg));
  }

  /** Return to the rig origin: identity pose, default field of view. */
  reset(): void {
    this.position = [0, 0, 0];
    this.yaw = 0;
    this.pitch = 0;
    this.fovDeg = DEFAULT_FOV_DEG;
  }
}
