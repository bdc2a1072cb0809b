/** Preloaded example browser: list the bundled case-study archives. */

import { ApiClient } from "./api.js";
import type { SessionArchive } from "./types.js";

export class ExamplesBrowser {
  readonly root: HTMLElement;

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient,
    private readonly onOpen: (exampleId: string, archive: SessionArchive) => void,
  ) {
    this.root = container;
    container.classList.add("examples-browser");
    container.innerHTML = `
      <h2>Preloaded examples</h2>
      <ul class="example-list"></ul>
    `;
  }

  async refresh(): Promise<void> {
    const { examples } = await this.api.listExamples();
    const list = this.root.querySelector(".example-list") as HTMLElement;
    list.innerHTML = "";
    for (const example of examples) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.type = "button";
      button.dataset.exampleId = example.id;
      button.textContent =
        `${example.dataset_name}: ${example.fitness_id}, ` +
        `${example.final_dimensions} dims, ${example.generations} gens, ` +
        `bloat ${example.bloat_method}`;
      button.addEventListener("click", () => void this.open(example.id));
      item.appendChild(button);
      list.appendChild(item);
    }
  }

  async open(exampleId: string): Promise<void> {
    const archive = await this.api.getExample(exampleId);
    this.onOpen(exampleId, archive);
  }
}
