import init, { tv_deblur, svm_surface, prox_curve } from "./pkg/proxama_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function drawImage(canvas, data, n) {
  const off = new OffscreenCanvas(n, n);
  const ctx = off.getContext("2d");
  const img = ctx.createImageData(n, n);
  for (let i = 0; i < n * n; i++) {
    const v = Math.round(255 * Math.min(1, Math.max(0, data[i])));
    img.data.set([v, v, v, 255], 4 * i);
  }
  ctx.putImageData(img, 0, 0);
  const c = canvas.getContext("2d");
  c.imageSmoothingEnabled = false;
  c.drawImage(off, 0, 0, canvas.width, canvas.height);
}

// x and y are arrays; draws a polyline with light axes
function drawLine(canvas, xs, ys, { xr, yr, diagonal = false } = {}) {
  const c = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 30;
  c.clearRect(0, 0, w, h);
  const [x0, x1] = xr ?? [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = yr ?? [Math.min(...ys), Math.max(...ys)];
  if (y1 === y0) { y0 -= 1; y1 += 1; }
  const px = (x) => pad + (w - 2 * pad) * (x - x0) / (x1 - x0);
  const py = (y) => h - pad - (h - 2 * pad) * (y - y0) / (y1 - y0);
  c.strokeStyle = "#bbb";
  c.beginPath();
  c.moveTo(pad, py(Math.min(Math.max(0, y0), y1))); c.lineTo(w - pad, py(Math.min(Math.max(0, y0), y1)));
  c.moveTo(px(Math.min(Math.max(0, x0), x1)), pad); c.lineTo(px(Math.min(Math.max(0, x0), x1)), h - pad);
  c.stroke();
  if (diagonal) {
    c.setLineDash([4, 4]);
    c.beginPath(); c.moveTo(px(x0), py(x0)); c.lineTo(px(x1), py(x1)); c.stroke();
    c.setLineDash([]);
  }
  c.strokeStyle = "#c0392b";
  c.lineWidth = 2;
  c.beginPath();
  xs.forEach((x, i) => (i ? c.lineTo(px(x), py(ys[i])) : c.moveTo(px(x), py(ys[i]))));
  c.stroke();
  c.lineWidth = 1;
  c.fillStyle = "#444";
  c.font = "11px sans-serif";
  c.fillText(y1.toPrecision(3), 2, pad);
  c.fillText(y0.toPrecision(3), 2, h - pad);
  c.fillText(String(x0), pad, h - 10);
  c.fillText(String(x1), w - pad - 20, h - 10);
}

function runTv() {
  const n = num("tv-size");
  $("tv-status").textContent = "running...";
  // let the status paint before the solver blocks the thread
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const r = tv_deblur(n, num("tv-lambda"), num("tv-iters"), $("tv-iso").checked, $("tv-prox").checked, 42);
      const ms = performance.now() - t0;
      drawImage($("tv-original"), r.original, n);
      drawImage($("tv-observed"), r.observed, n);
      drawImage($("tv-result"), r.reconstructed, n);
      const isnr = Array.from(r.isnr);
      drawLine($("tv-isnr"), isnr.map((_, k) => k), isnr);
      const last = isnr.length - 1;
      $("tv-status").textContent =
        `${last} iterations in ${ms.toFixed(0)} ms, ISNR ${isnr[last].toFixed(2)} dB, ` +
        `feasibility ${r.feasibility[last].toExponential(2)}`;
    } catch (e) {
      $("tv-status").textContent = `error: ${e.message ?? e}`;
    }
  }, 10);
}

function runSvm() {
  $("svm-status").textContent = "training...";
  setTimeout(() => {
    try {
      const g = 90;
      const r = svm_surface(num("svm-n"), num("svm-c"), num("svm-sigma"), num("svm-tau"), num("svm-iters"), g, 42);
      const canvas = $("svm-plot");
      const c = canvas.getContext("2d");
      const off = new OffscreenCanvas(g, g);
      const octx = off.getContext("2d");
      const img = octx.createImageData(g, g);
      const scale = Math.max(...Array.from(r.surface, Math.abs)) || 1;
      r.surface.forEach((v, i) => {
        const a = Math.min(1, Math.abs(v) / scale);
        const rgb = v >= 0 ? [255 - 90 * a, 255 - 60 * a, 255] : [255, 255 - 60 * a, 255 - 90 * a];
        img.data.set([...rgb, 255], 4 * i);
      });
      octx.putImageData(img, 0, 0);
      c.drawImage(off, 0, 0, canvas.width, canvas.height);
      const e = r.extent;
      const px = (u) => canvas.width * (u + e) / (2 * e);
      const py = (v) => canvas.height * (e - v) / (2 * e);
      for (let i = 0; i < r.labels.length; i++) {
        c.fillStyle = r.labels[i] > 0 ? "#1f4e9c" : "#b03a2e";
        c.beginPath();
        c.arc(px(r.points[2 * i]), py(r.points[2 * i + 1]), 3, 0, 2 * Math.PI);
        c.fill();
      }
      $("svm-status").textContent =
        `${r.iterations} iterations, training error ${r.train_error_pct.toFixed(2)}%`;
    } catch (err) {
      $("svm-status").textContent = `error: ${err.message ?? err}`;
    }
  }, 10);
}

function drawProx() {
  const lo = -4, hi = 4, n = 401;
  const ys = Array.from(prox_curve($("prox-kind").value, num("prox-gamma"), num("prox-weight"), lo, hi, n));
  const xs = ys.map((_, i) => lo + (hi - lo) * i / (n - 1));
  drawLine($("prox-plot"), xs, ys, { xr: [lo, hi], yr: [lo, hi], diagonal: true });
}

await init();
$("tv-run").addEventListener("click", runTv);
$("svm-run").addEventListener("click", runSvm);
for (const id of ["prox-kind", "prox-gamma", "prox-weight"]) $(id).addEventListener("input", drawProx);
drawProx();
