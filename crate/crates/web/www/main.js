import init, { sampleMatrix, switchOnce, corankHistogram } from "./pkg/switchlab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
let current = null;
let step = 0;

function guard(f) {
  return () => {
    $("error").textContent = "";
    try {
      f();
    } catch (e) {
      $("error").textContent = String(e.message ?? e);
    }
  };
}

function draw(view, moved = []) {
  const grid = $("grid");
  grid.style.gridTemplateColumns = `repeat(${view.n}, 14px)`;
  grid.replaceChildren();
  view.rows.forEach((row, s) =>
    row.forEach((x, t) => {
      const cell = document.createElement("div");
      if (x) cell.className = moved.some(([a, b]) => a === s && b === t) ? "one moved" : "one";
      grid.appendChild(cell);
    })
  );
  $("info").textContent =
    `rank ${view.rank}, corank ${view.corank}, ${view.switchings} feasible ordered switchings`;
  const fmt = (vs) => (vs.length ? vs.join("\n") : "(trivial)");
  $("kernel").textContent = `right kernel basis:\n${fmt(view.right_kernel)}\n\nleft kernel basis:\n${fmt(view.left_kernel)}`;
}

await init();

$("sample").onclick = guard(() => {
  current = JSON.parse(sampleMatrix(num("n"), num("d"), BigInt(num("seed"))));
  step = 0;
  $("switch").disabled = false;
  draw(current);
});

$("switch").onclick = guard(() => {
  step += 1;
  const r = JSON.parse(switchOnce(current.text, BigInt(num("seed") * 1000003 + step)));
  const [i, j, k, l] = r.switch.split(" ").map(Number);
  current = r.after;
  draw(current, [[i, l], [j, k]]);
  const sign = r.delta > 0 ? "+" : "";
  $("info").textContent += ` | switched (${r.switch}), rank ${r.rank_before} -> ${current.rank} (${sign}${r.delta})`;
});

$("hist").onclick = guard(() => {
  const h = JSON.parse(corankHistogram(num("n"), num("d"), num("trials"), BigInt(num("seed"))));
  const out = $("histogram");
  out.replaceChildren();
  h.counts.forEach((c, corank) => {
    const line = document.createElement("div");
    const bar = document.createElement("span");
    bar.className = "bar";
    bar.style.width = `${(300 * c) / h.trials}px`;
    line.append(`corank ${corank}: `, bar, ` ${c} (${((100 * c) / h.trials).toFixed(1)}%)`);
    out.appendChild(line);
  });
});
