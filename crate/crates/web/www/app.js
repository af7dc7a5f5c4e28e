// Build with: wasm-pack build crates/web --target web --out-dir www/pkg
import init, { plot, solve, allocate } from "./pkg/pmx_web.js";

const SAMPLE = {
  goods: 2,
  bids: [
    { id: "a", values: ["2", "3"], budget: "10" },
    { id: "b", values: ["5", "4"], budget: "20" },
  ],
  supply: [
    { steps: [{ until: "100", marginal: "0" }] },
    { steps: [{ until: "100", marginal: "0" }] },
  ],
};

// Must match the layout constants of the SVG renderer.
const SIZE = 480;
const MARGIN = 40;

const $ = (id) => document.getElementById(id);

function status(message, isError = false) {
  $("status").textContent = message;
  $("status").className = isError ? "error" : "";
}

function guarded(action) {
  return () => {
    try {
      action();
    } catch (e) {
      status(String(e), true);
    }
  };
}

function plotLimit(text) {
  const doc = JSON.parse(text);
  const max = Math.max(0, ...doc.bids.flatMap((b) => b.values.map(Number)));
  return max > 0 ? 1.2 * max : 1;
}

function showAllocation(report) {
  const rows = report.allocation
    .map((a) => `bid ${a.id}: ${a.bundle.join(" ")}`)
    .join("\n");
  $("output").textContent =
    `price: ${report.price.join(" ")}\nrevenue: ${report.revenue}\n` +
    `payments: ${report.payments}\naggregate: ${report.aggregate.join(" ")}\n${rows}`;
}

function draw() {
  const text = $("instance").value;
  $("plot").innerHTML = plot(text);
  const svg = $("plot").querySelector("svg");
  const limit = plotLimit(text);
  svg.addEventListener("click", (event) => {
    const box = svg.getBoundingClientRect();
    const x = ((event.clientX - box.left) * svg.viewBox.baseVal.width) / box.width;
    const y = ((event.clientY - box.top) * svg.viewBox.baseVal.height) / box.height;
    const p1 = ((x - MARGIN) / SIZE) * limit;
    const p2 = ((MARGIN + SIZE - y) / SIZE) * limit;
    if (p1 <= 0 || p2 <= 0) return;
    $("price").value = `${p1.toFixed(3)},${p2.toFixed(3)}`;
    guarded(runAllocate)();
  });
  status("Gray: indifference hyperplanes. Black: candidate prices. Click to allocate.");
}

function runSolve() {
  const doc = JSON.parse(solve($("instance").value));
  const best = doc.best.price.join(" ");
  const rows = doc.candidates
    .map((c) => {
      const price = c.price.join(" ");
      const cls = price === best ? ' class="best"' : "";
      return `<tr${cls}><td>${price}</td><td>${c.revenue ?? "no envy-free allocation"}</td></tr>`;
    })
    .join("");
  $("table").innerHTML = `<table><tr><th>candidate price</th><th>revenue</th></tr>${rows}</table>`;
  showAllocation(doc.best);
  status(`Optimal price ${best}, revenue ${doc.best.revenue}.`);
}

function runAllocate() {
  const report = JSON.parse(allocate($("instance").value, $("price").value));
  showAllocation(report);
  status(`Revenue at ${report.price.join(" ")}: ${report.revenue}.`);
}

await init();
$("instance").value = JSON.stringify(SAMPLE, null, 2);
$("draw").addEventListener("click", guarded(draw));
$("solve").addEventListener("click", guarded(runSolve));
$("allocate").addEventListener("click", guarded(runAllocate));
guarded(draw)();
