/** Result view: parameter summary, expressions, accuracy pair, fitness
 * curve, and the embedding plot (bar / scatter / drag-rotatable 3-D, or a
 * table with a notice above three dimensions). */

import {
  chartKindFor,
  renderBar1d,
  renderFitnessCurve,
  renderScatter2d,
  renderScatter3d,
} from "./plots.js";
import type { SessionArchive } from "./types.js";

function tableRow(cells: string[]): HTMLTableRowElement {
  const row = document.createElement("tr");
  for (const text of cells) {
    const cell = document.createElement("td");
    cell.textContent = text;
    row.appendChild(cell);
  }
  return row;
}

export class ResultView {
  readonly root: HTMLElement;
  private archive: SessionArchive | null = null;
  private yaw = 0.6;
  private pitch = 0.4;
  private dragging = false;
  private lastX = 0;
  private lastY = 0;

  constructor(container: HTMLElement) {
    this.root = container;
    container.classList.add("result-view");
    container.innerHTML = `
      <h2>Results</h2>
      <p class="result-empty">No result yet.</p>
      <div class="result-body" hidden>
        <p class="result-params"></p>
        <ol class="result-expressions"></ol>
        <p class="result-accuracies"></p>
        <h3>Fitness per generation</h3>
        <canvas class="fitness-canvas" width="560" height="180"></canvas>
        <h3>Embedding</h3>
        <p class="plot-notice" hidden></p>
        <canvas class="embedding-canvas" width="560" height="420"></canvas>
        <table class="embedding-table" hidden></table>
      </div>
    `;
    const canvas = this.embeddingCanvas();
    canvas.addEventListener("mousedown", (event) => {
      this.dragging = true;
      this.lastX = event.clientX;
      this.lastY = event.clientY;
    });
    window.addEventListener("mouseup", () => (this.dragging = false));
    window.addEventListener("mousemove", (event) => {
      if (!this.dragging || !this.archive) return;
      if (chartKindFor(this.archive.config.final_dimensions) !== "scatter-3d") return;
      this.yaw += (event.clientX - this.lastX) * 0.01;
      this.pitch += (event.clientY - this.lastY) * 0.01;
      this.lastX = event.clientX;
      this.lastY = event.clientY;
      this.drawEmbedding();
    });
  }

  private embeddingCanvas(): HTMLCanvasElement {
    return this.root.querySelector(".embedding-canvas") as HTMLCanvasElement;
  }

  show(archive: SessionArchive): void {
    this.archive = archive;
    (this.root.querySelector(".result-empty") as HTMLElement).hidden = true;
    (this.root.querySelector(".result-body") as HTMLElement).hidden = false;

    const cfg = archive.config;
    (this.root.querySelector(".result-params") as HTMLElement).textContent =
      `${archive.dataset.name}: population ${cfg.population_size}, ` +
      `${cfg.generations} generations, ${cfg.final_dimensions} dimensions, ` +
      `fitness ${cfg.fitness_id}, bloat ${cfg.bloat.method}, seed ${cfg.seed}; ` +
      `best cost ${archive.best_fitness.toFixed(4)}`;

    const list = this.root.querySelector(".result-expressions") as HTMLElement;
    list.innerHTML = "";
    archive.expressions.forEach((expression) => {
      const item = document.createElement("li");
      item.textContent = expression;
      list.appendChild(item);
    });

    const accs = archive.accuracies;
    (this.root.querySelector(".result-accuracies") as HTMLElement).textContent =
      `Random-forest 10-fold accuracy: original ` +
      `${accs.original?.toFixed(4) ?? "n/a"} vs embedding ` +
      `${accs.embedding?.toFixed(4) ?? "n/a"}`;

    const fitnessCanvas = this.root.querySelector(".fitness-canvas") as HTMLCanvasElement;
    const fitnessCtx = fitnessCanvas.getContext("2d");
    if (fitnessCtx) {
      renderFitnessCurve(fitnessCtx, fitnessCanvas.width, fitnessCanvas.height,
                         archive.fitness_history);
    }
    this.drawEmbedding();
  }

  drawEmbedding(): void {
    if (!this.archive) return;
    const archive = this.archive;
    const kind = chartKindFor(archive.config.final_dimensions);
    const canvas = this.embeddingCanvas();
    const notice = this.root.querySelector(".plot-notice") as HTMLElement;
    const table = this.root.querySelector(".embedding-table") as HTMLTableElement;
    const labels = archive.dataset.instance_labels;

    if (kind === "table-only") {
      canvas.hidden = true;
      notice.hidden = false;
      notice.textContent =
        `${archive.config.final_dimensions} dimensions cannot be plotted; ` +
        `showing the first rows as a table.`;
      table.hidden = false;
      table.innerHTML = "";
      const headerCells = ["class"];
      for (let d = 0; d < archive.config.final_dimensions; d++) {
        headerCells.push(`dim ${d + 1}`);
      }
      table.appendChild(tableRow(headerCells));
      archive.embedding.slice(0, 25).forEach((row, i) => {
        table.appendChild(
          tableRow([labels[i] ?? "", ...row.map((v) => v.toFixed(4))]),
        );
      });
      return;
    }

    canvas.hidden = false;
    notice.hidden = kind !== "scatter-3d";
    if (kind === "scatter-3d") {
      notice.textContent = "Drag to rotate the 3-D embedding.";
    }
    table.hidden = true;
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    if (kind === "bar-1d") {
      renderBar1d(ctx, canvas.width, canvas.height, archive.embedding, labels);
    } else if (kind === "scatter-2d") {
      renderScatter2d(ctx, canvas.width, canvas.height, archive.embedding, labels);
    } else {
      renderScatter3d(ctx, canvas.width, canvas.height, archive.embedding, labels,
                      this.yaw, this.pitch);
    }
  }
}
