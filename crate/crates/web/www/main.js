import init, { landscape, coexistence, fourierTest } from "./pkg/chsh_kcbs_web.js";

const $ = (id) => document.getElementById(id);

function call(fn, ...args) {
  try {
    return JSON.parse(fn(...args));
  } catch (e) {
    return { error: String(e) };
  }
}

// blue for negative, red for positive, white at zero
function diverging(v, scale) {
  const t = Math.max(-1, Math.min(1, v / scale));
  const a = Math.round(255 * (1 - Math.abs(t)));
  return t >= 0 ? `rgb(255,${a},${a})` : `rgb(${a},${a},255)`;
}

let grid = null;

function drawLandscape() {
  const n = Number($("ls-n").value);
  const which = $("ls-which").value;
  const canvas = $("ls-canvas");
  const ctx = canvas.getContext("2d");
  grid = call(landscape, n, 91, 181);
  if (grid.error) {
    $("ls-readout").innerHTML = `<span class="error">${grid.error}</span>`;
    return;
  }
  const rows = grid.theta_deg.length;
  const cols = grid.phi_deg.length;
  const w = canvas.width / cols;
  const h = canvas.height / rows;
  const scale = (key) => Math.max(...grid[key].flat().map(Math.abs)) || 1;
  const sc = { chsh: scale("chsh"), kcbs: scale("kcbs") };
  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < cols; j++) {
      const c = grid.chsh[i][j];
      const k = grid.kcbs[i][j];
      if (which === "both") {
        ctx.fillStyle = c > 0 && k > 0 ? "#7b2" : c > 0 ? "#fbb" : k > 0 ? "#bbf" : "#fff";
      } else {
        ctx.fillStyle = diverging(which === "chsh" ? c : k, sc[which]);
      }
      ctx.fillRect(j * w, i * h, Math.ceil(w), Math.ceil(h));
    }
  }
  $("ls-readout").textContent = "θ down (0°..180°), φ across (0°..360°)";
}

$("ls-canvas").addEventListener("mousemove", (ev) => {
  if (!grid || grid.error) return;
  const r = ev.target.getBoundingClientRect();
  const j = Math.floor(((ev.clientX - r.left) / r.width) * grid.phi_deg.length);
  const i = Math.floor(((ev.clientY - r.top) / r.height) * grid.theta_deg.length);
  if (i < 0 || j < 0 || i >= grid.theta_deg.length || j >= grid.phi_deg.length) return;
  $("ls-readout").textContent =
    `θ = ${grid.theta_deg[i].toFixed(1)}°  φ = ${grid.phi_deg[j].toFixed(1)}°\n` +
    `CHSH margin ${grid.chsh[i][j].toFixed(5)}\nKCBS margin ${grid.kcbs[i][j].toFixed(5)}`;
});

function drawCurve() {
  const n = Number($("cx-n").value);
  const canvas = $("cx-canvas");
  const ctx = canvas.getContext("2d");
  const d = call(coexistence, n, 361);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (d.error) {
    $("cx-readout").innerHTML = `<span class="error">${d.error}</span>`;
    return;
  }
  const pad = 30;
  const all = d.chsh.concat(d.kcbs);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const x = (t) => pad + ((canvas.width - 2 * pad) * t) / 90;
  const y = (v) => canvas.height - pad - ((canvas.height - 2 * pad) * (v - lo)) / (hi - lo);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(x(0), y(0));
  ctx.lineTo(x(90), y(0));
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText("0", 8, y(0) + 4);
  ctx.fillText("θ = 90°", x(90) - 30, canvas.height - 10);

  const line = (vals, color) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    vals.forEach((v, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, x(d.theta_deg[i]), y(v)));
    ctx.stroke();
  };
  line(d.chsh, "#c33");
  line(d.kcbs, "#33c");

  ctx.fillStyle = "#000";
  ctx.beginPath();
  ctx.arc(x(d.theta_opt_deg), y(d.overlap), 4, 0, 2 * Math.PI);
  ctx.fill();

  $("cx-readout").textContent =
    `red: CHSH margin, blue: KCBS margin\n` +
    `crossing θ_opt = ${d.theta_opt_deg.toFixed(3)}°\n` +
    `common margin  = ${d.overlap.toFixed(6)}\n` +
    `KCBS violated for θ < ${d.kcbs_edge_deg.toFixed(3)}°`;
}

function runFourier() {
  const d = call(
    fourierTest,
    Number($("ft-n").value),
    Number($("ft-theta").value),
    Number($("ft-phi").value),
    $("ft-alice").value,
    $("ft-bob").value.trim(),
    Number($("ft-shots").value),
    Number($("ft-seed").value),
  );
  if (d.error) {
    $("ft-out").innerHTML = `<p class="error">${d.error}</p>`;
    return;
  }
  const fmt = (v) => (v === null || v === undefined ? "–" : Number(v).toFixed(6));
  const counts = d.counts ?? [null, null, null];
  $("ft-out").innerHTML = `
    <table>
      <tr><th>ancilla outcome</th><th>0</th><th>1</th><th>2</th></tr>
      <tr><th>exact probability</th>${d.probabilities.map((p) => `<td>${fmt(p)}</td>`).join("")}</tr>
      <tr><th>counts</th>${counts.map((c) => `<td>${c ?? "–"}</td>`).join("")}</tr>
    </table>
    <table>
      <tr><th>direct expectation</th><td>${fmt(d.exact_reference)}</td></tr>
      <tr><th>combined estimator</th><td>${fmt(d.estimator_combined)}</td></tr>
      <tr><th>from P0</th><td>${fmt(d.estimator_p0)}</td></tr>
      <tr><th>from P1</th><td>${fmt(d.estimator_p1)}</td></tr>
      <tr><th>standard error</th><td>${fmt(d.standard_error)}</td></tr>
    </table>`;
}

await init();
$("ls-go").addEventListener("click", drawLandscape);
$("cx-go").addEventListener("click", drawCurve);
$("ft-go").addEventListener("click", runFourier);
drawLandscape();
drawCurve();
runFourier();
