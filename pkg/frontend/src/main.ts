/**
 * Browser entry point: loads the bundle named in the URL, wires camera
 * controls and UI, and drives the renderer.
 *
 * Controls: drag to look, W/A/S/D to move, Q/E for down/up (hold Shift for a
 * 5x step), slider for field of view, per-layer checkboxes, Reset to return
 * to the rig centre.
 */

import { Camera, MOVE_STEP } from "./camera.js";
import { BundleError, loadBundle } from "./loader.js";
import { MsiRenderer } from "./renderer.js";
import { LayerMask } from "./scene.js";
import { parseViewerParams } from "./urlstate.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const browserIO = {
  async fetchJson(url: string): Promise<unknown> {
    const resp = await fetch(url);
    if (!resp.ok) throw new Error(`${resp.status} ${resp.statusText}`);
    return resp.json();
  },
  loadImage(url: string): Promise<HTMLImageElement> {
    return new Promise((resolve, reject) => {
      const img = new Image();
      img.onload = () => resolve(img);
      img.onerror = () => reject(new Error(`failed to load ${url}`));
      img.src = url;
    });
  },
};

function setStatus(text: string, isError = false): void {
  const status = el<HTMLDivElement>("status");
  status.textContent = text;
  status.classList.toggle("error", isError);
  status.style.display = text ? "block" : "none";
}

async function run(): Promise<void> {
  const canvas = el<HTMLCanvasElement>("view");
  const gl = canvas.getContext("webgl2", { alpha: false, antialias: true });
  if (!gl) {
    setStatus("WebGL2 is not available in this browser.", true);
    return;
  }

  const params = parseViewerParams(window.location.search);
  setStatus(`Loading bundle '${params.bundle}' ...`);
  const bundle = await loadBundle<HTMLImageElement>(params.bundle, browserIO, (n, total) =>
    setStatus(`Loading layers ${n}/${total} ...`),
  );
  setStatus("");

  const radii = bundle.meta.radii_metres;
  const camera = new Camera(radii[0]);
  camera.position = camera.clampToHeadbox(params.position);
  camera.rotate((params.yawDeg * Math.PI) / 180, (params.pitchDeg * Math.PI) / 180);
  const mask = new LayerMask(radii.length);

  const renderer = new MsiRenderer(gl);
  renderer.setLayers(bundle.images, radii);

  // Layer checkboxes.
  const layerPanel = el<HTMLDivElement>("layers");
  radii.forEach((r, i) => {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.addEventListener("change", () => mask.set(i, box.checked));
    label.appendChild(box);
    label.appendChild(document.createTextNode(` ${i}: ${r.toFixed(2)} m`));
    layerPanel.appendChild(label);
  });

  const fovSlider = el<HTMLInputElement>("fov");
  fovSlider.addEventListener("input", () => camera.setFov(Number(fovSlider.value)));

  el<HTMLButtonElement>("reset").addEventListener("click", () => {
    camera.reset();
    fovSlider.value = String(camera.fovDeg);
    for (const box of layerPanel.querySelectorAll("input")) box.checked = true;
    mask.setAll(true);
  });

  // Mouse look.
  let dragging = false;
  let lastX = 0;
  let lastY = 0;
  canvas.addEventListener("mousedown", (e) => {
    dragging = true;
    lastX = e.clientX;
    lastY = e.clientY;
  });
  window.addEventListener("mouseup", () => (dragging = false));
  window.addEventListener("mousemove", (e) => {
    if (!dragging) return;
    camera.rotate(-(e.clientX - lastX) * 0.005, -(e.clientY - lastY) * 0.005);
    lastX = e.clientX;
    lastY = e.clientY;
  });

  // Keyboard movement.
  window.addEventListener("keydown", (e) => {
    const s = e.shiftKey;
    switch (e.key.toLowerCase()) {
      case "w": camera.move(1, 0, 0, s); break;
      case "s": camera.move(-1, 0, 0, s); break;
      case "a": camera.move(0, -1, 0, s); break;
      case "d": camera.move(0, 1, 0, s); break;
      case "q": camera.move(0, 0, -1, s); break;
      case "e": camera.move(0, 0, 1, s); break;
      case "r": camera.reset(); fovSlider.value = String(camera.fovDeg); break;
      default: return;
    }
    e.preventDefault();
  });

  const readout = el<HTMLDivElement>("readout");
  function frame(): void {
    const dpr = window.devicePixelRatio || 1;
    const w = Math.round(canvas.clientWidth * dpr);
    const h = Math.round(canvas.clientHeight * dpr);
    if (canvas.width !== w || canvas.height !== h) {
      canvas.width = w;
      canvas.height = h;
    }
    renderer.render(camera, mask);
    const [x, y, z] = camera.position;
    const atLimit = camera.distance >= camera.maxDistance - 1e-9 ? " (at limit)" : "";
    readout.textContent =
      `pos (${x.toFixed(3)}, ${y.toFixed(3)}, ${z.toFixed(3)}) m | ` +
      `dist ${camera.distance.toFixed(3)} / ${camera.maxDistance.toFixed(3)} m${atLimit} | ` +
      `yaw ${((camera.yaw * 180) / Math.PI).toFixed(1)}° ` +
      `pitch ${((camera.pitch * 180) / Math.PI).toFixed(1)}° | ` +
      `fov ${camera.fovDeg.toFixed(0)}° | step ${MOVE_STEP} m (Shift ×5)`;
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

run().catch((e) => {
  const msg = e instanceof BundleError ? e.message : `unexpected error: ${e}`;
  setStatus(msg, true);
});
