import init, { VideoDemo, syntheticTrial, codelengthCurve } from "./pkg/mdlan_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

let demo = null;

function draw(canvas, rgba, w, h) {
  canvas.width = w;
  canvas.height = h;
  const img = new ImageData(new Uint8ClampedArray(rgba), w, h);
  canvas.getContext("2d").putImageData(img, 0, 0);
}

function showFrame(j) {
  if (!demo) return;
  ["c0", "c1", "c2"].forEach((id, layer) => draw($(id), demo.rgba(layer, j), demo.width, demo.height));
}

function runVideo() {
  $("vinfo").textContent = "running...";
  setTimeout(() => {
    try {
      if (demo) demo.free();
      const t0 = performance.now();
      demo = new VideoDemo(num("vh"), num("vw"), num("vf"), num("vs"), num("vd"), BigInt(num("vseed")));
      const ms = (performance.now() - t0).toFixed(0);
      $("vinfo").textContent =
        `rank ${demo.rank}, ${demo.iters} iterations, F-measure ${demo.fMeasure.toFixed(3)} (${ms} ms)`;
      $("vframe").max = demo.frames - 1;
      $("vframe").disabled = false;
      showFrame(Number($("vframe").value = 0));
    } catch (e) {
      $("vinfo").textContent = String(e);
    }
  }, 0);
}

function runTrial() {
  $("tout").textContent = "running...";
  setTimeout(() => {
    try {
      const lines = ["method  lr_nrmse   sp_nrmse   rank  nnz/planted  iters"];
      for (const method of ["mdlan", "rpca"]) {
        const [lr, sp, rank, nnz, k, iters] =
          syntheticTrial(num("tm"), num("tn"), num("tr"), num("tp"), BigInt(num("tseed")), method);
        lines.push(
          `${method.padEnd(7)} ${lr.toExponential(2).padEnd(10)} ${sp.toExponential(2).padEnd(10)} ` +
          `${String(rank).padEnd(5)} ${nnz}/${k}  ${iters}`);
      }
      $("tout").textContent = lines.join("\n");
    } catch (e) {
      $("tout").textContent = String(e);
    }
  }, 0);
}

function plotCurve() {
  const c = $("curve");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  let v;
  try {
    v = codelengthCurve(num("ls"), num("lt"), -10, 10, 201);
  } catch (e) {
    ctx.fillText(String(e), 10, 20);
    return;
  }
  const max = Math.max(...v);
  const sx = (k) => 20 + (k / 200) * (c.width - 40);
  const sy = (b) => c.height - 20 - (b / max) * (c.height - 40);
  for (const [offset, colour] of [[0, "#123"], [1, "#9ab"]]) {
    ctx.strokeStyle = colour;
    ctx.beginPath();
    for (let k = 0; k <= 200; k++) {
      const y = sy(v[2 * k + offset]);
      k === 0 ? ctx.moveTo(sx(k), y) : ctx.lineTo(sx(k), y);
    }
    ctx.stroke();
  }
  ctx.fillStyle = "#444";
  ctx.fillText("-10", 10, c.height - 5);
  ctx.fillText("10", c.width - 30, c.height - 5);
  ctx.fillText(`${max.toFixed(1)} bits`, 22, 14);
}

await init();
$("vrun").onclick = runVideo;
$("vframe").oninput = (e) => showFrame(Number(e.target.value));
$("trun").onclick = runTrial;
$("lrun").onclick = plotCurve;
plotCurve();
