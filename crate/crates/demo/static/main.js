import init, { Demo, barrier_profile } from "./pkg/tugwar_demo.js";

const $ = (id) => document.getElementById(id);
const SIZE = 200;
let demo = null;
let image = null;

function color(t) {
  // dark blue to yellow
  const r = Math.round(255 * Math.min(1, Math.max(0, 1.5 * t - 0.2)));
  const g = Math.round(255 * Math.min(1, Math.max(0, t)));
  const b = Math.round(255 * Math.min(1, Math.max(0, 0.8 - t)));
  return [r, g, b];
}

function drawHeat() {
  const values = demo.heatmap(SIZE);
  const finite = values.filter(Number.isFinite);
  const lo = Math.min(...finite), hi = Math.max(...finite);
  const off = document.createElement("canvas");
  off.width = off.height = SIZE;
  const ctx = off.getContext("2d");
  const img = ctx.createImageData(SIZE, SIZE);
  values.forEach((v, i) => {
    const [r, g, b] = Number.isFinite(v) ? color((v - lo) / (hi - lo || 1)) : [255, 255, 255];
    img.data.set([r, g, b, 255], 4 * i);
  });
  ctx.putImageData(img, 0, 0);
  image = off;
  const c = $("heat").getContext("2d");
  c.imageSmoothingEnabled = false;
  c.drawImage(off, 0, 0, 400, 400);
}

function toCanvas(x, y) {
  return [(x + 1) * 200, (1 - y) * 200];
}

function playAt(ev) {
  if (!demo) return;
  const rect = ev.target.getBoundingClientRect();
  const x = (ev.clientX - rect.left) / 200 - 1;
  const y = 1 - (ev.clientY - rect.top) / 200;
  if (x * x + y * y >= 1) return;
  const out = demo.play(x, y, BigInt(Math.floor(Math.random() * 2 ** 31)));
  const payoff = out[out.length - 1];
  const c = $("heat").getContext("2d");
  c.drawImage(image, 0, 0, 400, 400);
  c.strokeStyle = "#fff";
  c.lineWidth = 1.5;
  c.beginPath();
  for (let i = 0; i + 1 < out.length - 1; i += 2) {
    const [px, py] = toCanvas(out[i], out[i + 1]);
    i === 0 ? c.moveTo(px, py) : c.lineTo(px, py);
  }
  c.stroke();
  const steps = (out.length - 1) / 2 - 1;
  $("game").textContent =
    `start (${x.toFixed(2)}, ${y.toFixed(2)}): payoff ${payoff.toFixed(4)} after ${steps} steps, ` +
    `DPP value ${demo.value_at(x, y).toFixed(4)}`;
}

function drawProfile() {
  const eps = Number($("eps").value), pc = Number($("pc").value), pe = Number($("pe").value);
  let data;
  try {
    data = barrier_profile(eps, pc, pe, Number($("angle").value), 1.0, 1.5, 60);
  } catch (e) {
    return;
  }
  const c = $("profile").getContext("2d");
  const w = 420, h = 300;
  c.clearRect(0, 0, w, h);
  const ys = [];
  for (let i = 0; i < data.length; i += 3) ys.push(data[i + 1], data[i + 2]);
  const lo = Math.min(...ys, 0), hi = Math.max(...ys, 0);
  const sx = (r) => 30 + ((r - 1) / 0.5) * (w - 40);
  const sy = (v) => h - 20 - ((v - lo) / (hi - lo || 1)) * (h - 40);
  c.strokeStyle = "#999";
  c.beginPath();
  c.moveTo(30, sy(0));
  c.lineTo(w - 10, sy(0));
  c.stroke();
  for (const [k, col] of [[1, "#1f5fbf"], [2, "#c0392b"]]) {
    c.strokeStyle = col;
    c.beginPath();
    for (let i = 0; i < data.length; i += 3) {
      const [px, py] = [sx(data[i]), sy(data[i + k])];
      i === 0 ? c.moveTo(px, py) : c.lineTo(px, py);
    }
    c.stroke();
  }
  c.fillStyle = "#333";
  c.fillText("|x| = 1", 30, h - 5);
  c.fillText("|x| = 1.5", w - 60, h - 5);
  c.fillText(lo.toExponential(1), 0, sy(lo));
}

function solve() {
  $("status").textContent = "solving…";
  setTimeout(() => {
    try {
      if (demo) demo.free();
      demo = new Demo(Number($("eps").value), Number($("pc").value), Number($("pe").value),
        BigInt($("seed").value));
      $("status").textContent = `${demo.sweeps()} sweeps, bracket gap ${demo.bracket_gap().toExponential(2)}`;
      drawHeat();
      drawProfile();
    } catch (e) {
      $("status").textContent = `error: ${e.message ?? e}`;
    }
  }, 10);
}

await init();
$("solve").addEventListener("click", solve);
$("heat").addEventListener("click", playAt);
$("angle").addEventListener("input", drawProfile);
solve();
