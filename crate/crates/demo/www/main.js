import init, { pcaFlows, pcaOnline, sumStability } from "./pkg/coupled_demo.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
const PAD = { left: 60, right: 140, top: 12, bottom: 34 };

const numbers = (text) => text.split(",").map((s) => Number(s.trim())).filter(Number.isFinite);

function extent(values) {
  let lo = Infinity, hi = -Infinity;
  for (const v of values) if (Number.isFinite(v)) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  if (lo === hi) { lo -= 1; hi += 1; }
  return [lo, hi];
}

// series: [{ label, xs, ys, points? }]
function plot(canvas, series, { logY = false, xLabel = "", yLabel = "", zeroX = false } = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  const ty = (y) => (logY ? Math.log10(Math.max(y, 1e-16)) : y);
  const [x0, x1] = extent(series.flatMap((s) => s.xs));
  const [y0, y1] = extent(series.flatMap((s) => s.ys.map(ty)));
  const px = (x) => PAD.left + ((x - x0) / (x1 - x0)) * (w - PAD.left - PAD.right);
  const py = (y) => h - PAD.bottom - ((ty(y) - y0) / (y1 - y0)) * (h - PAD.top - PAD.bottom);

  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.strokeRect(PAD.left, PAD.top, w - PAD.left - PAD.right, h - PAD.top - PAD.bottom);
  for (let k = 0; k <= 4; k++) {
    const xv = x0 + ((x1 - x0) * k) / 4;
    const yv = y0 + ((y1 - y0) * k) / 4;
    ctx.fillText(xv.toPrecision(3), px(xv) - 12, h - PAD.bottom + 14);
    ctx.fillText(logY ? `1e${yv.toFixed(1)}` : yv.toPrecision(3), 4, h - PAD.bottom - ((yv - y0) / (y1 - y0)) * (h - PAD.top - PAD.bottom) + 4);
  }
  ctx.fillText(xLabel, w - PAD.right - 60, h - 4);
  ctx.fillText(yLabel, PAD.left + 4, PAD.top + 12);
  if (zeroX && x0 < 0 && x1 > 0) {
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(px(0), PAD.top);
    ctx.lineTo(px(0), h - PAD.bottom);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  series.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    ctx.strokeStyle = ctx.fillStyle = color;
    if (s.points) {
      s.xs.forEach((x, k) => {
        ctx.beginPath();
        ctx.arc(px(x), py(s.ys[k]), 3.5, 0, 2 * Math.PI);
        ctx.fill();
      });
    } else {
      ctx.beginPath();
      s.xs.forEach((x, k) => (k ? ctx.lineTo(px(x), py(s.ys[k])) : ctx.moveTo(px(x), py(s.ys[k]))));
      ctx.stroke();
    }
    ctx.fillText(s.label, w - PAD.right + 10, PAD.top + 14 + 16 * i);
  });
}

function bind(formId, msgId, action) {
  const form = document.getElementById(formId);
  const msg = document.getElementById(msgId);
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    msg.textContent = "";
    msg.className = "";
    try {
      action(new FormData(form), msg);
    } catch (err) {
      msg.textContent = String(err);
      msg.className = "error";
    }
  });
  form.requestSubmit();
}

function runFlows(f, msg) {
  const out = JSON.parse(pcaFlows(new Float64Array(numbers(f.get("spectrum"))), Number(f.get("seed")), Number(f.get("steps")), Number(f.get("dt"))));
  const series = out.curves.map((c) => ({ label: c.rule, xs: c.t, ys: c.angle }));
  plot(document.getElementById("flows-plot"), series, { logY: true, xLabel: "t", yLabel: "angle (rad)" });
  const final = out.curves.map((c) => `${c.rule} λ=${c.lambda.at(-1).toPrecision(6)}`).join(", ");
  msg.textContent = `oracle λ₁ = ${out.oracle_lambda.toPrecision(6)}; final ${final}`;
}

function runOnline(f, msg) {
  const out = JSON.parse(pcaOnline(f.get("rule"), new Float64Array(numbers(f.get("spectrum"))), Number(f.get("seed")), Number(f.get("samples")), Number(f.get("rate"))));
  const c = out.curves[0];
  plot(document.getElementById("online-plot"), [{ label: c.rule, xs: c.t, ys: c.angle }], { logY: true, xLabel: "sample", yLabel: "angle (rad)" });
  msg.textContent = `final angle ${c.angle.at(-1).toExponential(2)} rad, λ estimate ${c.lambda.at(-1).toPrecision(5)} (oracle ${out.oracle_lambda.toPrecision(5)})`;
}

function runStability(f, msg) {
  const out = JSON.parse(sumStability(new Float64Array(numbers(f.get("singulars"))), Number(f.get("rows")), Number(f.get("cols")), Number(f.get("seed"))));
  const series = out.reports.map((r) => ({
    label: `triple ${r.triple_index}`,
    xs: r.numeric.map((z) => z[0]),
    ys: r.numeric.map((z) => z[1]),
    points: true,
  }));
  plot(document.getElementById("stability-plot"), series, { xLabel: "Re", yLabel: "Im", zeroX: true });
  const rows = out.reports.map((r) => {
    const top = Math.max(...r.numeric.map((z) => z[0]));
    return `<tr><td>${r.triple_index}</td><td>${r.classification}</td><td>${r.predicted_classification}</td><td>${top.toFixed(4)}</td><td>${r.state.sigma.toPrecision(4)}</td><td>${r.state.rho.toPrecision(4)}</td></tr>`;
  });
  document.getElementById("stability-table").innerHTML =
    "<tr><th>triple</th><th>numeric</th><th>closed form</th><th>max Re λ</th><th>σ</th><th>ρ</th></tr>" + rows.join("");
  msg.textContent = `singular values ${out.singulars.join(", ")}`;
}

await init();
bind("flows", "flows-msg", runFlows);
bind("online", "online-msg", runOnline);
bind("stability", "stability-msg", runStability);
