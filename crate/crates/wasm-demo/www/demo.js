// Plain-JS driver for the facekit wasm demo. Expects the wasm-bindgen
// output in ./pkg (see the repository README for the two build commands).

import init, { Demo, version } from "./pkg/facekit_wasm.js";

const $ = (id) => document.getElementById(id);

function drawGray(canvas, pixels, w, h) {
  canvas.width = w;
  canvas.height = h;
  const ctx = canvas.getContext("2d");
  const image = ctx.createImageData(w, h);
  for (let i = 0; i < w * h; i++) {
    const v = pixels[i];
    image.data[4 * i] = v;
    image.data[4 * i + 1] = v;
    image.data[4 * i + 2] = v;
    image.data[4 * i + 3] = 255;
  }
  ctx.putImageData(image, 0, 0);
  return ctx;
}

function drawHist(canvas, bins, color) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#222";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const max = Math.max(1, ...bins);
  const barWidth = canvas.width / bins.length;
  ctx.fillStyle = color;
  bins.forEach((count, i) => {
    const barHeight = (count / max) * (canvas.height - 4);
    ctx.fillRect(i * barWidth, canvas.height - barHeight, Math.max(1, barWidth - 0.5), barHeight);
  });
}

function drawRect(ctx, rect, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 1;
  ctx.strokeRect(rect.x + 0.5, rect.y + 0.5, rect.w - 1, rect.h - 1);
}

function drawCurves(canvas, curves, bestEpoch) {
  const ctx = canvas.getContext("2d");
  ctx.fillStyle = "#222";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (!curves.length) return;
  const finite = curves.flat().filter(Number.isFinite);
  const top = Math.max(...finite, 1e-6);
  const x = (epoch) => (epoch / Math.max(1, curves.length - 1)) * (canvas.width - 10) + 5;
  const y = (v) => canvas.height - 5 - (v / top) * (canvas.height - 10);
  const colors = ["#5af", "#fa5", "#5f8"];
  for (let series = 0; series < 3; series++) {
    ctx.strokeStyle = colors[series];
    ctx.beginPath();
    let started = false;
    curves.forEach((row, epoch) => {
      const v = row[series];
      if (!Number.isFinite(v)) return;
      if (!started) { ctx.moveTo(x(epoch), y(v)); started = true; }
      else ctx.lineTo(x(epoch), y(v));
    });
    ctx.stroke();
  }
  ctx.strokeStyle = "#fff6";
  ctx.beginPath();
  ctx.moveTo(x(bestEpoch), 0);
  ctx.lineTo(x(bestEpoch), canvas.height);
  ctx.stroke();
}

function confusionTable(labels, confusion, unknown) {
  const rows = confusion
    .map((row, i) => {
      const cells = row.map((c) => `<td>${c}</td>`).join("");
      return `<tr><th>${labels[i]}</th>${cells}</tr>`;
    })
    .join("");
  const header = labels.map((l) => `<th>${l}</th>`).join("") + "<th>unknown</th>";
  return `<table class="confusion"><tr><th>true &#92; predicted</th>${header}</tr>${rows}</table>
    <p class="hint">${unknown} probe(s) fell below the acceptance threshold</p>`;
}

const SIZE = 48;

function refreshSegmentation(demo) {
  const profile = Number($("seg-profile").value);
  const seed = BigInt($("seg-seed").value || 0);
  const threshold = Number($("seg-threshold").value);

  const gray = demo.face_pixels(profile, seed, SIZE);
  drawGray($("seg-gray"), gray, SIZE, SIZE);
  const binary = demo.face_binary_pixels(profile, seed, SIZE, threshold);
  drawGray($("seg-binary"), binary, SIZE, SIZE);

  // Halves view: the same crop with a separator column.
  const halves = $("seg-halves");
  const ctx = drawGray(halves, gray, SIZE, SIZE);
  const shifted = ctx.getImageData(SIZE / 2, 0, SIZE / 2, SIZE);
  halves.width = SIZE + 1;
  const ctx2 = halves.getContext("2d");
  const left = new ImageData(SIZE / 2, SIZE);
  for (let yRow = 0; yRow < SIZE; yRow++) {
    for (let xCol = 0; xCol < SIZE / 2; xCol++) {
      const src = 4 * (yRow * SIZE + xCol);
      const dst = 4 * (yRow * (SIZE / 2) + xCol);
      for (let c = 0; c < 3; c++) left.data[dst + c] = gray[yRow * SIZE + xCol];
      left.data[dst + 3] = 255;
    }
  }
  ctx2.putImageData(left, 0, 0);
  ctx2.putImageData(shifted, SIZE / 2 + 1, 0);
  ctx2.fillStyle = "#fa5";
  ctx2.fillRect(SIZE / 2, 0, 1, SIZE);

  const stats = JSON.parse(demo.face_histograms(profile, seed, SIZE, threshold));
  $("seg-threshold-label").textContent =
    threshold < 0 ? `otsu (${stats.otsu})` : `${stats.threshold}`;
  drawHist($("seg-hist-whole"), stats.whole, "#5af");
  drawHist($("seg-hist-left"), stats.left, "#fa5");
  drawHist($("seg-hist-right"), stats.right, "#5f8");
  drawHist($("seg-hist-binary"), stats.binary_whole, "#f66");
}

function sceneArgs() {
  return {
    seed: BigInt($("det-scene-seed").value || 0),
    faceSize: Number($("det-face-size").value),
    scale: Number($("det-scale").value) / 100,
    neighbors: Number($("det-neighbors").value),
  };
}

function refreshScene(demo, trained) {
  const { seed, faceSize, scale, neighbors } = sceneArgs();
  $("det-face-size-label").textContent = faceSize;
  $("det-scale-label").textContent = scale.toFixed(2);
  $("det-neighbors-label").textContent = neighbors;

  const w = 64, h = 64;
  const pixels = demo.scene_pixels(seed, w, h, faceSize);
  const ctx = drawGray($("det-scene"), pixels, w, h);
  const truth = JSON.parse(demo.scene_truth(seed, w, h, faceSize));
  drawRect(ctx, truth, "#3d3");

  if (!trained) return;
  try {
    const found = JSON.parse(demo.detect_scene(seed, w, h, faceSize, scale, neighbors));
    found.detections.forEach((d) => drawRect(ctx, d, "#f44"));
    const lines = found.detections
      .map((d) => `detection ${d.x},${d.y} ${d.w}x${d.h} (${d.neighbors} neighbors)`)
      .join("\n");
    $("det-result").textContent =
      `${found.raw} raw windows accepted -> ${found.detections.length} grouped\n` +
      (lines || "nothing grouped: lower min neighbors?");
  } catch (e) {
    $("det-result").textContent = String(e);
  }
}

function main(demo) {
  $("footer").textContent = `facekit-wasm ${version()} — all numbers reproduce from the seeds above`;

  // Section 1.
  for (const id of ["seg-profile", "seg-seed", "seg-threshold"]) {
    $(id).addEventListener("input", () => refreshSegmentation(demo));
  }
  refreshSegmentation(demo);

  // Section 2.
  let detectorTrained = false;
  $("det-train").addEventListener("click", () => {
    $("det-report").textContent = "training…";
    setTimeout(() => {
      const stages = Number($("det-stages").value);
      const seed = BigInt($("det-train-seed").value || 0);
      const report = JSON.parse(demo.train_detector(seed, stages, 300, 1200));
      const lines = report.stages
        .map((s, i) =>
          `stage ${i + 1}: ${s.weaks} weak(s), fpr ${s.fpr.toFixed(3)}, ` +
          `detection ${s.detection.toFixed(3)}, cumulative fpr ${s.cumulative_fpr.toFixed(4)}`)
        .join("\n");
      $("det-report").textContent =
        lines +
        `\noverall: fpr ${report.overall_fpr.toFixed(4)}, detection ${report.overall_detection.toFixed(3)}` +
        (report.negatives_exhausted ? " (negative pool exhausted)" : "");
      detectorTrained = true;
      refreshScene(demo, detectorTrained);
    }, 20);
  });
  for (const id of ["det-scene-seed", "det-face-size", "det-scale", "det-neighbors"]) {
    $(id).addEventListener("input", () => refreshScene(demo, detectorTrained));
  }
  refreshScene(demo, false);

  // Section 3.
  let recognizerTrained = false;
  $("rec-train").addEventListener("click", () => {
    $("rec-status").textContent = "enrolling… (detector + network training)";
    setTimeout(() => {
      const per = Number($("rec-per").value);
      const epochs = Number($("rec-epochs").value);
      const restarts = Number($("rec-restarts").value);
      const seed = BigInt($("rec-seed").value || 0);
      try {
        const out = JSON.parse(demo.train_recognizer(seed, per, epochs, restarts));
        drawCurves($("rec-curves"), out.curves, out.best_epoch);
        $("rec-status").textContent =
          `restart ${out.restart}, best epoch ${out.best_epoch}/${out.curves.length}, ` +
          `val MSE ${out.final_val_mse.toExponential(2)}, ` +
          `val R ${out.regression_r == null ? "n/a" : out.regression_r.toFixed(4)}, ` +
          `${out.skipped} image(s) skipped\n` +
          `held-out accuracy ${(out.test_accuracy * 100).toFixed(1)}%`;
        $("rec-eval").innerHTML = confusionTable(out.labels, out.confusion, out.unknown);
        recognizerTrained = true;
      } catch (e) {
        $("rec-status").textContent = String(e);
      }
    }, 20);
  });
  $("rec-probe").addEventListener("click", () => {
    const profile = Number($("rec-probe-profile").value);
    const seed = BigInt($("rec-probe-seed").value || 0);
    const pixels = demo.identity_scene_pixels(profile, seed);
    drawGray($("rec-probe-scene"), pixels, 48, 48);
    if (!recognizerTrained) {
      $("rec-probe-result").textContent = "enroll first";
      return;
    }
    try {
      const out = JSON.parse(demo.recognize_scene(profile, seed));
      const ok = out.result === out.truth;
      $("rec-probe-result").innerHTML =
        `truth: ${out.truth}\npredicted: <span class="verdict ${ok ? "good" : "bad"}">${out.result}</span>` +
        ` (confidence ${out.confidence.toFixed(3)})`;
    } catch (e) {
      $("rec-probe-result").textContent = String(e);
    }
  });
}

init().then(() => main(new Demo())).catch((e) => {
  $("footer").textContent =
    `failed to load wasm: ${e}. Build it first — see the README's demo section.`;
});
