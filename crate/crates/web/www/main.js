import init, { shiftCurve, trajectory, chartGrid } from "./pkg/jsray_web.js";

const val = (box, name) => box.querySelector(`[name=${name}]`).value;
const num = (box, name) => Number(val(box, name));

function report(box, text, failed) {
  const pre = box.querySelector("pre");
  pre.textContent = text;
  pre.className = failed ? "err" : "";
}

function plot(canvas, xs, series) {
  const g = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  g.clearRect(0, 0, w, h);
  const ys = series.flatMap(s => s.ys).filter(y => y !== null);
  if (!ys.length) return;
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-9) { y0 -= 0.5; y1 += 0.5; }
  const px = x => 30 + (w - 40) * (x - x0) / (x1 - x0 || 1);
  const py = y => h - 20 - (h - 30) * (y - y0) / (y1 - y0);
  g.fillStyle = "#666";
  g.fillText(y1.toPrecision(4), 2, 12);
  g.fillText(y0.toPrecision(4), 2, h - 22);
  for (const s of series) {
    g.strokeStyle = s.color;
    g.beginPath();
    let pen = false;
    xs.forEach((x, i) => {
      const y = s.ys[i];
      if (y === null) { pen = false; return; }
      pen ? g.lineTo(px(x), py(y)) : g.moveTo(px(x), py(y));
      pen = true;
    });
    g.stroke();
  }
  return { px, py };
}

function runShift() {
  const box = document.getElementById("shift");
  try {
    const r = JSON.parse(shiftCurve(val(box, "m"), val(box, "mp"), num(box, "lo"), num(box, "hi"), 400));
    const axes = plot(box.querySelector("canvas"), r.s, [{ ys: r.value, color: "#1565c0" }]);
    if (axes && r.beta !== null) {
      const g = box.querySelector("canvas").getContext("2d");
      g.fillStyle = "#c62828";
      g.beginPath();
      g.arc(axes.px(r.beta), axes.py(r.min_value), 4, 0, 2 * Math.PI);
      g.fill();
    }
    report(box, `optimal shift ${r.beta}\nminimum ${r.min_value}\nlimit distance ${r.limit}\nhalf detour ${r.detour / 2}`);
  } catch (e) {
    report(box, String(e), true);
  }
}

function runQc() {
  const box = document.getElementById("qc");
  try {
    const r = JSON.parse(trajectory(num(box, "ratio"), num(box, "modulus"), num(box, "eps"), num(box, "cre"), num(box, "cim"), num(box, "tmax"), 200));
    const kq = r.k_q.map(k => (k === null ? null : Math.min(k, 4 * r.target)));
    plot(box.querySelector("canvas"), r.t, [
      { ys: r.k_p, color: "#1565c0" },
      { ys: kq, color: "#2e7d32" },
      { ys: r.t.map(() => r.target), color: "#c62828" },
    ]);
    const first = r.valid.indexOf(true);
    report(box, `blue: first map, green: second map bound, red: limit ${r.target}\n` +
      `exponent ${r.power}\nbound valid from t = ${first < 0 ? "never" : r.t[first]}`);
  } catch (e) {
    report(box, String(e), true);
  }
}

function runChart() {
  const box = document.getElementById("chart");
  const canvas = box.querySelector("canvas");
  try {
    const r = JSON.parse(chartGrid(num(box, "a"), num(box, "b"), num(box, "t"), 24));
    const g = canvas.getContext("2d");
    g.clearRect(0, 0, canvas.width, canvas.height);
    const panel = (ox, xs, ys, inner, color) => {
      const cx = ox + 175, cy = 180, rad = 160;
      g.strokeStyle = "#aaa";
      g.beginPath(); g.arc(cx, cy, rad, 0, 2 * Math.PI); g.stroke();
      if (inner !== null) { g.beginPath(); g.arc(cx, cy, rad * inner, 0, 2 * Math.PI); g.stroke(); }
      g.fillStyle = color;
      xs.forEach((x, i) => g.fillRect(cx + rad * x - 1, cy - rad * ys[i] - 1, 2, 2));
    };
    panel(0, r.x, r.y, r.inner, "#1565c0");
    panel(360, r.fx, r.fy, r.inner_flowed, "#c62828");
    report(box, `left: grid image, right: after flowing\ndiagram error ${r.error}`);
  } catch (e) {
    report(box, String(e), true);
  }
}

await init();
for (const [id, fn] of [["shift", runShift], ["qc", runQc], ["chart", runChart]]) {
  document.getElementById(id).addEventListener("input", fn);
  fn();
}
