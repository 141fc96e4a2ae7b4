import init, { basis_heatmap, fit_cuboid, TrackingDemo } from "./pkg/shapetrack_web.js";

const $ = (id) => document.getElementById(id);

function showError(e) {
  $("error").textContent = String(e);
}

// --- heatmap -------------------------------------------------------------

function drawHeatmap() {
  const canvas = $("hm");
  const w = canvas.width, h = canvas.height;
  let values;
  try {
    values = basis_heatmap(+$("hm-l").value, +$("hm-m").value, w, h);
  } catch (e) {
    showError(e);
    return;
  }
  showError("");
  let max = 0;
  for (const v of values) max = Math.max(max, Math.abs(v));
  const img = canvas.getContext("2d").createImageData(w, h);
  for (let i = 0; i < values.length; i++) {
    const t = max > 0 ? values[i] / max : 0;
    // blue for negative, red for positive
    img.data[4 * i] = 255 * Math.min(1, 1 + t);
    img.data[4 * i + 1] = 255 * (1 - Math.abs(t));
    img.data[4 * i + 2] = 255 * Math.min(1, 1 - t);
    img.data[4 * i + 3] = 255;
  }
  canvas.getContext("2d").putImageData(img, 0, 0);
  $("hm-range").textContent = `|S| <= ${max.toFixed(4)}  (theta down, phi across)`;
}

// --- simple wireframe view ----------------------------------------------

class View {
  constructor(canvas) {
    this.canvas = canvas;
    this.yaw = 0.6;
    this.pitch = 0.4;
    this.scale = 60;
    this.mesh = null;
    this.points = null;
    let last = null;
    canvas.addEventListener("pointerdown", (e) => { last = [e.clientX, e.clientY]; canvas.setPointerCapture(e.pointerId); });
    canvas.addEventListener("pointerup", () => { last = null; });
    canvas.addEventListener("pointermove", (e) => {
      if (!last) return;
      this.yaw += (e.clientX - last[0]) * 0.01;
      this.pitch += (e.clientY - last[1]) * 0.01;
      last = [e.clientX, e.clientY];
      this.draw();
    });
  }

  project(x, y, z) {
    const cy = Math.cos(this.yaw), sy = Math.sin(this.yaw);
    const cp = Math.cos(this.pitch), sp = Math.sin(this.pitch);
    const x1 = cy * x + sy * y;
    const y1 = -sy * x + cy * y;
    const y2 = cp * y1 - sp * z;
    const z2 = sp * y1 + cp * z;
    return [this.canvas.width / 2 + this.scale * x1, this.canvas.height / 2 - this.scale * z2, y2];
  }

  draw() {
    const ctx = this.canvas.getContext("2d");
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.mesh) {
      const p = this.mesh.positions, idx = this.mesh.indices;
      const screen = [];
      for (let i = 0; i < p.length; i += 3) screen.push(this.project(p[i], p[i + 1], p[i + 2]));
      ctx.strokeStyle = "rgba(40, 70, 160, 0.45)";
      ctx.beginPath();
      for (let t = 0; t < idx.length; t += 3) {
        const a = screen[idx[t]], b = screen[idx[t + 1]], c = screen[idx[t + 2]];
        ctx.moveTo(a[0], a[1]);
        ctx.lineTo(b[0], b[1]);
        ctx.lineTo(c[0], c[1]);
        ctx.closePath();
      }
      ctx.stroke();
    }
    if (this.points) {
      ctx.fillStyle = "#c33";
      const p = this.points;
      for (let i = 0; i < p.length; i += 3) {
        const [sx, sy] = this.project(p[i], p[i + 1], p[i + 2]);
        ctx.fillRect(sx - 1.5, sy - 1.5, 3, 3);
      }
    }
  }
}

// --- cuboid fit -----------------------------------------------------------

const fitView = new View($("fc"));

function runFit() {
  try {
    const mesh = fit_cuboid(+$("fc-x").value, +$("fc-y").value, +$("fc-z").value, +$("fc-l").value, 24, 48);
    fitView.mesh = { positions: mesh.positions, indices: mesh.indices };
    $("fc-iou").textContent = `IoU vs cuboid: ${mesh.iou.toFixed(4)}`;
    mesh.free();
    showError("");
  } catch (e) {
    showError(e);
  }
  fitView.draw();
}

// --- tracking ---------------------------------------------------------------

const trackView = new View($("tr"));
let demo = null;

function scenarioConfig() {
  const shape = $("tr-shape").value;
  const ground_truth =
    shape === "cuboid" ? { kind: "cuboid", half_extents: [1.5, 0.5, 0.5] } :
    shape === "sphere" ? { kind: "sphere", radius: 1.0 } : { kind: "teapot" };
  const rate = (10 * Math.PI) / 180;
  const rotating = $("tr-rot").checked;
  const config = {
    ground_truth,
    points_per_frame: +$("tr-n").value,
    noise_variance: 0.01,
    frames: 1000,
    seed: 1,
    iou_resolution: 40,
    tracker: { degree: +$("tr-l").value },
  };
  if (rotating) {
    config.motion = { kind: "rotation", axis: [0, 0, 1], rate };
    config.tracker.motion_model = { axis: [0, 0, 1], rate };
  }
  return JSON.stringify(config);
}

function refreshTrack(report) {
  const mesh = demo.estimate_mesh(20, 40);
  trackView.mesh = { positions: mesh.positions, indices: mesh.indices };
  mesh.free();
  trackView.points = demo.points();
  trackView.draw();
  if (report) {
    const r = JSON.parse(report);
    $("tr-out").textContent = `k=${r.k}  IoU=${r.iou.toFixed(4)}  position error=${r.position_error.toFixed(3)}`;
  } else {
    $("tr-out").textContent = "not started";
  }
}

function resetTrack() {
  try {
    if (demo) demo.free();
    demo = new TrackingDemo(scenarioConfig());
    refreshTrack(null);
    showError("");
  } catch (e) {
    showError(e);
  }
}

function stepTrack(n) {
  let report = null;
  try {
    for (let i = 0; i < n; i++) report = demo.step();
  } catch (e) {
    showError(e);
  }
  refreshTrack(report);
}

async function main() {
  await init();
  for (const id of ["hm-l", "hm-m"]) $(id).addEventListener("input", drawHeatmap);
  $("fc-go").addEventListener("click", runFit);
  $("tr-reset").addEventListener("click", resetTrack);
  $("tr-step").addEventListener("click", () => stepTrack(1));
  $("tr-run").addEventListener("click", () => stepTrack(20));
  for (const id of ["tr-shape", "tr-l", "tr-n", "tr-rot"]) $(id).addEventListener("change", resetTrack);
  drawHeatmap();
  runFit();
  resetTrack();
}

main().catch(showError);
