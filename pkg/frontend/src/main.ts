/** Page assembly: dataset panel, run form, examples, results, chat. */

import { ApiClient } from "./api.js";
import { ChatPanel } from "./chat.js";
import { ExamplesBrowser } from "./examples.js";
import { ResultView } from "./results.js";
import { RunForm } from "./runform.js";
import { DatasetPanel } from "./upload.js";

export function mountApp(root: HTMLElement, api: ApiClient = new ApiClient()): {
  dataset: DatasetPanel;
  runForm: RunForm;
  examples: ExamplesBrowser;
  results: ResultView;
  chat: ChatPanel;
} {
  root.innerHTML = `
    <header><h1>GP-NLDR dashboard</h1></header>
    <main>
      <section id="dataset"></section>
      <section id="runform"></section>
      <section id="examples"></section>
      <section id="results"></section>
      <section id="chat"></section>
      <section id="import">
        <h2>Reload a saved session</h2>
        <input type="file" id="import-file" accept=".json,application/json">
      </section>
    </main>
  `;

  const results = new ResultView(root.querySelector("#results") as HTMLElement);
  const chat = new ChatPanel(root.querySelector("#chat") as HTMLElement, api);

  const runForm = new RunForm(
    root.querySelector("#runform") as HTMLElement,
    api,
    (jobId) => {
      void api.getResult(jobId).then((archive) => {
        results.show(archive);
        chat.enableFor({ jobId });
      });
    },
  );

  const dataset = new DatasetPanel(
    root.querySelector("#dataset") as HTMLElement,
    api,
    (meta) => runForm.setDataset(meta.id),
  );

  const examples = new ExamplesBrowser(
    root.querySelector("#examples") as HTMLElement,
    api,
    (exampleId, archive) => {
      results.show(archive);
      chat.enableFor({ exampleId });
    },
  );
  void examples.refresh();

  const importInput = root.querySelector("#import-file") as HTMLInputElement;
  importInput.addEventListener("change", async () => {
    const file = importInput.files?.[0];
    if (!file) return;
    const text = await file.text();
    results.show(JSON.parse(text));
    await chat.importArchive(text);
  });

  return { dataset, runForm, examples, results, chat };
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app") as HTMLElement);
}
