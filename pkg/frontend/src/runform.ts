/** Parameter form and run lifecycle: submit, poll every second, report. */

import { ApiClient, ApiError } from "./api.js";
import type { JobSnapshot, RunConfigBody } from "./types.js";
import { defaultConfig, validateConfig } from "./validate.js";

export const POLL_INTERVAL_MS = 1000;

export class RunForm {
  readonly root: HTMLElement;
  private datasetId: string | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  private readonly form: HTMLFormElement;
  private readonly errors: HTMLElement;
  private readonly status: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient,
    private readonly onDone: (jobId: string) => void,
  ) {
    this.root = container;
    container.classList.add("run-form");
    container.innerHTML = `
      <h2>Run parameters</h2>
      <form>
        <label>Population size <input name="population_size" type="number" value="100"></label>
        <label>Generations <input name="generations" type="number" value="100"></label>
        <label>Final dimensions <input name="final_dimensions" type="number" value="2"></label>
        <label>Fitness
          <select name="fitness_id">
            <option value="gpmal">GP-MaL</option>
            <option value="gpmal2">GP-MaL-2</option>
            <option value="nrmse">NRMSE</option>
          </select>
        </label>
        <label>Bloat control
          <select name="bloat_method">
            <option value="none">none</option>
            <option value="lexicographic" selected>lexicographic</option>
            <option value="double_tournament">double tournament</option>
            <option value="tarpeian">Tarpeian</option>
          </select>
        </label>
        <label class="bloat-double" hidden>p(smaller wins)
          <input name="p_smaller" type="number" step="0.05" value="0.7"></label>
        <label class="bloat-tarpeian" hidden>Penalty probability
          <input name="p_tarpeian" type="number" step="0.05" value="0.3"></label>
        <label>Seed <input name="seed" type="number" value="0"></label>
        <button type="submit" disabled>Start run</button>
      </form>
      <ul class="form-errors"></ul>
      <div class="run-status"></div>
    `;
    this.form = container.querySelector("form") as HTMLFormElement;
    this.errors = container.querySelector(".form-errors") as HTMLElement;
    this.status = container.querySelector(".run-status") as HTMLElement;

    const bloatSelect = this.form.querySelector("[name=bloat_method]") as HTMLSelectElement;
    bloatSelect.addEventListener("change", () => {
      (this.root.querySelector(".bloat-double") as HTMLElement).hidden =
        bloatSelect.value !== "double_tournament";
      (this.root.querySelector(".bloat-tarpeian") as HTMLElement).hidden =
        bloatSelect.value !== "tarpeian";
    });
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
  }

  setDataset(datasetId: string | null): void {
    this.datasetId = datasetId;
    (this.form.querySelector("button") as HTMLButtonElement).disabled = datasetId === null;
  }

  /** Read the form into the exact wire shape the server validates. */
  readConfig(): RunConfigBody {
    const value = (name: string) =>
      (this.form.querySelector(`[name=${name}]`) as HTMLInputElement | HTMLSelectElement).value;
    const config = defaultConfig();
    config.population_size = Number(value("population_size"));
    config.generations = Number(value("generations"));
    config.final_dimensions = Number(value("final_dimensions"));
    config.fitness_id = value("fitness_id") as RunConfigBody["fitness_id"];
    config.bloat.method = value("bloat_method") as RunConfigBody["bloat"]["method"];
    config.bloat.p_smaller = Number(value("p_smaller"));
    config.bloat.p_tarpeian = Number(value("p_tarpeian"));
    config.seed = Number(value("seed"));
    return config;
  }

  async submit(): Promise<void> {
    if (!this.datasetId) return;
    const config = this.readConfig();
    const problems = validateConfig(config);
    this.errors.innerHTML = "";
    if (problems.length > 0) {
      for (const problem of problems) {
        const item = document.createElement("li");
        item.textContent = `${problem.field}: ${problem.message}`;
        this.errors.appendChild(item);
      }
      return;
    }
    try {
      const { job_id } = await this.api.submitRun(this.datasetId, config);
      this.watch(job_id);
    } catch (error) {
      const item = document.createElement("li");
      if (error instanceof ApiError) {
        item.textContent = `${error.field ?? error.code}: ${error.message}`;
      } else {
        item.textContent = String(error);
      }
      this.errors.appendChild(item);
    }
  }

  /** Poll the job once per second until it settles. */
  watch(jobId: string): void {
    this.stopPolling();
    this.renderStatus({ state: "queued", progress: 0 } as JobSnapshot);
    this.timer = setInterval(() => {
      void this.poll(jobId);
    }, POLL_INTERVAL_MS);
    void this.poll(jobId);
  }

  private async poll(jobId: string): Promise<void> {
    let job: JobSnapshot;
    try {
      job = await this.api.getJob(jobId);
    } catch (error) {
      this.stopPolling();
      this.status.textContent = `polling failed: ${String(error)}`;
      return;
    }
    this.renderStatus(job);
    if (job.state === "done") {
      this.stopPolling();
      this.onDone(jobId);
    } else if (job.state === "failed") {
      this.stopPolling();
    }
  }

  private renderStatus(job: JobSnapshot): void {
    const total = job.generations_total ?? 0;
    const parts = [`state: ${job.state}`, `generation ${job.progress}${total ? ` / ${total}` : ""}`];
    if (job.fitness_history && job.fitness_history.length > 0) {
      parts.push(`best ${job.fitness_history[job.fitness_history.length - 1].toFixed(4)}`);
    }
    if (job.error) {
      parts.push(`error: ${job.error}`);
    }
    this.status.textContent = parts.join(" | ");
  }

  stopPolling(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
