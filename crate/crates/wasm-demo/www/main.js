import init, { candidate, certify, integrate } from "./pkg/choreo_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
let proof = null;

function setStatus(text, ok) {
  const s = $("status");
  s.textContent = text;
  s.className = ok === undefined ? "" : ok ? "ok" : "bad";
}

function params() {
  return Float64Array.from(document.querySelectorAll("#params input"), (i) => Number(i.value));
}

function loadCandidate() {
  const x = candidate($("system").value);
  $("params").replaceChildren(
    ...Array.from(x, (v, i) => {
      const l = document.createElement("label");
      l.textContent = `x${i} `;
      const inp = document.createElement("input");
      inp.type = "number";
      inp.step = "any";
      inp.value = v;
      l.append(inp);
      return l;
    }),
  );
  resetProof();
}

function resetProof() {
  if (proof) proof.free();
  proof = null;
  $("unfold").disabled = true;
  $("download").disabled = true;
}

function draw(orbit) {
  const n = orbit.bodies;
  const p = orbit.positions;
  const c = $("plot");
  const ctx = c.getContext("2d");
  let [x0, x1, y0, y1] = [Infinity, -Infinity, Infinity, -Infinity];
  for (let i = 0; i < p.length; i += 2) {
    x0 = Math.min(x0, p[i]); x1 = Math.max(x1, p[i]);
    y0 = Math.min(y0, p[i + 1]); y1 = Math.max(y1, p[i + 1]);
  }
  const scale = 0.9 * Math.min(c.width / (x1 - x0 || 1), c.height / (y1 - y0 || 1));
  const tx = (x) => c.width / 2 + (x - (x0 + x1) / 2) * scale;
  const ty = (y) => c.height / 2 - (y - (y0 + y1) / 2) * scale;
  ctx.clearRect(0, 0, c.width, c.height);
  const samples = p.length / (2 * n);
  for (let b = 0; b < n; b++) {
    ctx.strokeStyle = COLORS[b % COLORS.length];
    ctx.beginPath();
    for (let k = 0; k < samples; k++) {
      const j = 2 * (k * n + b);
      k === 0 ? ctx.moveTo(tx(p[j]), ty(p[j + 1])) : ctx.lineTo(tx(p[j]), ty(p[j + 1]));
    }
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.beginPath();
    ctx.arc(tx(p[2 * b]), ty(p[2 * b + 1]), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function run(action) {
  try {
    action();
  } catch (e) {
    setStatus(String(e.message ?? e), false);
  }
}

$("system").addEventListener("change", () => run(loadCandidate));
$("params").addEventListener("input", resetProof);

$("integrate").addEventListener("click", () =>
  run(() => {
    const orbit = integrate($("system").value, params(), Number($("total").value), 0.005);
    draw(orbit);
    setStatus(`${orbit.times.length} samples up to t = ${orbit.times.at(-1).toFixed(3)}`);
    orbit.free();
  }),
);

$("certify").addEventListener("click", () => {
  setStatus("proving...");
  // Let the status paint before the (blocking) proof starts.
  setTimeout(() =>
    run(() => {
      resetProof();
      const start = performance.now();
      proof = certify($("system").value, params(), Number($("delta").value));
      const secs = ((performance.now() - start) / 1000).toFixed(2);
      const ok = proof.verdict === "UniqueZero";
      setStatus(`${proof.verdict} after ${proof.iterations} iteration(s), ${secs} s`, ok);
      const fmt = (v) => Array.from({ length: v.length / 2 }, (_, i) => `[${v[2 * i]}, ${v[2 * i + 1]}]`).join("\n");
      $("report").textContent =
        `box\n${fmt(proof.box)}\n\nimage\n${fmt(proof.image)}` + (proof.cause ? `\n\n${proof.cause}` : "");
      $("unfold").disabled = !ok;
      $("download").disabled = false;
    }), 10);
});

$("unfold").addEventListener("click", () =>
  run(() => {
    const orbit = proof.curve(100);
    draw(orbit);
    setStatus(`period ${orbit.times.at(-1).toFixed(6)}, largest junction residual ${orbit.residual.toExponential(1)}`, true);
    orbit.free();
  }),
);

$("download").addEventListener("click", () =>
  run(() => {
    const blob = new Blob([proof.toml()], { type: "application/toml" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = `${$("system").value}.toml`;
    a.click();
    URL.revokeObjectURL(a.href);
  }),
);

await init();
run(loadCandidate);
