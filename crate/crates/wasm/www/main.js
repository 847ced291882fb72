import init, { p_r1_curve, generate_instance, dpll_tree, alpha_sweep } from "./pkg/onesat_wasm.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const list = (id) => new Float64Array($(id).value.split(",").map(Number));

function run(button, out, task) {
  $(button).addEventListener("click", () => {
    $(out).textContent = "running...";
    $(out).classList.remove("err");
    setTimeout(() => {
      try {
        const t0 = performance.now();
        const msg = task();
        $(out).textContent = `${msg} (${((performance.now() - t0) / 1000).toFixed(2)} s)`;
      } catch (e) {
        $(out).textContent = String(e.message ?? e);
        $(out).classList.add("err");
      }
    }, 10);
  });
}

function plotLines(canvas, series, { logY = false, yLabel = "" } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, L = 60, R = 120, T = 15, B = 35;
  ctx.clearRect(0, 0, W, H);
  const pts = series.flatMap((s) => s.points.filter((p) => Number.isFinite(p.y) && (!logY || p.y > 0)));
  if (pts.length === 0) return;
  const ty = (y) => (logY ? Math.log10(y) : y);
  const xs = pts.map((p) => p.x), ys = pts.map((p) => ty(p.y));
  let [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  if (!logY) y0 = Math.min(0, y0);
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const sx = (x) => L + ((x - x0) / (x1 - x0)) * (W - L - R);
  const sy = (y) => H - B - ((ty(y) - y0) / (y1 - y0)) * (H - T - B);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#333";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(L, T);
  ctx.lineTo(L, H - B);
  ctx.lineTo(W - R, H - B);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const x = x0 + ((x1 - x0) * i) / 4;
    ctx.fillText(x.toFixed(2), sx(x) - 12, H - B + 16);
    const y = y0 + ((y1 - y0) * i) / 4;
    const shown = logY ? 10 ** y : y;
    ctx.fillText(shown.toPrecision(3), 4, H - B - ((y - y0) / (y1 - y0)) * (H - T - B) + 4);
  }
  ctx.fillText(yLabel, L + 6, T + 4);

  series.forEach((s, i) => {
    ctx.strokeStyle = ctx.fillStyle = COLORS[i % COLORS.length];
    const good = s.points.filter((p) => Number.isFinite(p.y) && (!logY || p.y > 0));
    ctx.beginPath();
    good.forEach((p, j) => (j ? ctx.lineTo(sx(p.x), sy(p.y)) : ctx.moveTo(sx(p.x), sy(p.y))));
    ctx.stroke();
    for (const p of good) {
      ctx.beginPath();
      ctx.arc(sx(p.x), sy(p.y), 3, 0, 2 * Math.PI);
      p.censored ? ctx.stroke() : ctx.fill();
      if (p.err) {
        ctx.beginPath();
        ctx.moveTo(sx(p.x), sy(Math.max(p.y - p.err, logY ? p.y / 10 : y0)));
        ctx.lineTo(sx(p.x), sy(p.y + p.err));
        ctx.stroke();
      }
    }
    ctx.fillText(s.label, W - R + 12, T + 14 + 16 * i);
  });
}

function plotTree(canvas, nodes) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  ctx.clearRect(0, 0, W, H);
  const kids = nodes.map(() => []);
  for (const n of nodes) if (n.parent !== null) kids[n.parent].push(n.id);
  const pos = new Array(nodes.length);
  let leaf = 0, maxDepth = 0;
  const place = (id, level) => {
    maxDepth = Math.max(maxDepth, level);
    if (kids[id].length === 0) {
      pos[id] = [leaf++, level];
    } else {
      kids[id].forEach((c) => place(c, level + 1));
      const xs = kids[id].map((c) => pos[c][0]);
      pos[id] = [(Math.min(...xs) + Math.max(...xs)) / 2, level];
    }
  };
  place(0, 0);
  const px = (i) => 10 + (leaf > 1 ? (i / (leaf - 1)) * (W - 20) : (W - 20) / 2);
  const py = (l) => 12 + (maxDepth ? (l / maxDepth) * (H - 24) : 0);
  const r = Math.max(1.5, Math.min(6, (W / Math.max(leaf, 1)) * 0.3));

  ctx.strokeStyle = "#bbb";
  for (const n of nodes) {
    if (n.parent === null) continue;
    const [a, b] = pos[n.parent], [c, d] = pos[n.id];
    ctx.beginPath();
    ctx.moveTo(px(a), py(b));
    ctx.lineTo(px(c), py(d));
    ctx.stroke();
  }
  const fill = { internal: "#1f77b4", contradiction: "#d62728", solution: "#2ca02c" };
  for (const n of nodes) {
    const [x, l] = pos[n.id];
    ctx.fillStyle = fill[n.kind];
    ctx.beginPath();
    ctx.arc(px(x), py(l), n.kind === "solution" ? r * 1.8 : r, 0, 2 * Math.PI);
    ctx.fill();
  }
}

await init();

run("p-run", "p-out", () => {
  const pts = JSON.parse(p_r1_curve(num("p-n"), list("p-alphas"), num("p-samples"), num("p-seed")));
  plotLines($("p-plot"), [{ label: `n=${num("p-n")}`, points: pts.map((p) => ({ x: p.alpha, y: p.p_hat, err: p.half_width })) }], {
    yLabel: "p(r=1)",
  });
  const best = pts.reduce((a, b) => (b.p_hat > a.p_hat ? b : a));
  return `peak p(r=1) = ${best.p_hat.toFixed(4)} at density ${best.alpha}`;
});

run("t-run", "t-out", () => {
  const text = generate_instance($("t-kind").value, num("t-n"), num("t-alpha"), num("t-seed"));
  const tree = JSON.parse(dpll_tree(text, $("t-up").checked));
  plotTree($("t-plot"), tree.nodes);
  const leaves = tree.nodes.filter((n) => n.kind !== "internal").length;
  const root = tree.nodes[0].excited;
  const excited = root === undefined ? "" : `, ${root} excited states`;
  return `${tree.status} after ${tree.calls} calls, ${leaves} leaves${excited}\n${tree.assignment.join(" ")}`;
});

run("s-run", "s-out", () => {
  const curves = JSON.parse(alpha_sweep($("s-kinds").value, num("s-n"), list("s-alphas"), num("s-count"), num("s-seed")));
  plotLines(
    $("s-plot"),
    curves.map((c) => ({ label: c.label, points: c.points.map((p) => ({ x: p.x, y: p.median, censored: p.censored })) })),
    { logY: true, yLabel: "median DPLL calls" },
  );
  return curves.map((c) => `${c.label}: ${c.points.map((p) => `${p.x}:${p.median}`).join(" ")}`).join("\n");
});
