/** Dataset upload and preview (original values side by side with scaled). */

import { ApiClient, ApiError } from "./api.js";
import type { DatasetMeta } from "./types.js";

function row(cells: string[]): HTMLTableRowElement {
  const tr = document.createElement("tr");
  for (const text of cells) {
    const td = document.createElement("td");
    td.textContent = text;
    tr.appendChild(td);
  }
  return tr;
}

export class DatasetPanel {
  readonly root: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient,
    private readonly onDataset: (meta: DatasetMeta) => void,
  ) {
    this.root = container;
    container.classList.add("dataset-panel");
    container.innerHTML = `
      <h2>Dataset</h2>
      <form class="upload-form">
        <label>CSV file <input type="file" name="file" accept=".csv,text/csv"></label>
        <label>Name <input type="text" name="name" value="dataset"></label>
        <label><input type="checkbox" name="has_header" checked> First row is a header</label>
        <label>Label column <input type="text" name="label_column" value="last"></label>
        <button type="submit">Upload</button>
      </form>
      <p class="upload-error" role="alert" hidden></p>
      <div class="dataset-summary"></div>
      <div class="preview"></div>
    `;
    const form = container.querySelector(".upload-form") as HTMLFormElement;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.upload();
    });
  }

  private async readFileText(): Promise<string | null> {
    const input = this.root.querySelector("[name=file]") as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return null;
    return file.text();
  }

  async upload(csvOverride?: string): Promise<void> {
    const error = this.root.querySelector(".upload-error") as HTMLElement;
    error.hidden = true;
    const csv = csvOverride ?? (await this.readFileText());
    if (!csv) {
      error.textContent = "Choose a CSV file first.";
      error.hidden = false;
      return;
    }
    const value = (name: string) =>
      (this.root.querySelector(`[name=${name}]`) as HTMLInputElement).value;
    const labelColumn = value("label_column").trim() || "last";
    try {
      const meta = await this.api.uploadDataset({
        csv,
        name: value("name") || "dataset",
        has_header: (this.root.querySelector("[name=has_header]") as HTMLInputElement).checked,
        label_column: /^-?\d+$/.test(labelColumn) ? Number(labelColumn) : labelColumn,
      });
      this.renderSummary(meta);
      await this.renderPreview(meta.id);
      this.onDataset(meta);
    } catch (err) {
      error.textContent =
        err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      error.hidden = false;
    }
  }

  private renderSummary(meta: DatasetMeta): void {
    (this.root.querySelector(".dataset-summary") as HTMLElement).textContent =
      `${meta.name}: ${meta.num_instances} instances x ${meta.num_features} features, ` +
      `classes: ${meta.class_names.join(", ")}`;
  }

  private async renderPreview(datasetId: string): Promise<void> {
    const preview = await this.api.previewDataset(datasetId);
    const target = this.root.querySelector(".preview") as HTMLElement;
    target.innerHTML = "<h3>First rows (original | scaled)</h3>";
    const table = document.createElement("table");
    table.appendChild(row(["class", ...preview.feature_names]));
    preview.rows.forEach((values, i) => {
      table.appendChild(
        row([
          preview.labels[i],
          ...values.map((v, j) => `${v} | ${preview.scaled[i][j].toFixed(3)}`),
        ]),
      );
    });
    target.appendChild(table);
  }
}
