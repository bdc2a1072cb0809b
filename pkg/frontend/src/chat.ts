/** Chat panel: session lifecycle, transcript, export/import.
 *
 * The session opens with the automatic summary exchange (performed by the
 * server); input stays disabled while a request is in flight; provider
 * error codes surface as banners, and an auth failure re-opens the key
 * form. Only run/example references ever travel to the chat endpoints.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ChatMessage } from "./types.js";

export interface ChatTarget {
  jobId?: string;
  exampleId?: string;
}

export interface ProviderChoice {
  provider: "http" | "mock";
  apiKey: string;
  modelId: string;
  wordLimit: number;
}

const ERROR_BANNERS: Record<string, string> = {
  auth_failure: "The provider rejected the API key. Please re-enter it.",
  rate_limited: "The provider is throttling requests; try again shortly.",
  timeout: "The provider did not answer in time; try again.",
  malformed_response: "The provider returned an unreadable answer.",
  provider_error: "The provider failed to answer.",
};

export class ChatPanel {
  readonly root: HTMLElement;
  private sessionId: string | null = null;
  private busy = false;
  private target: ChatTarget | null = null;

  private readonly transcript: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly form: HTMLFormElement;
  private readonly input: HTMLInputElement;
  private readonly send: HTMLButtonElement;
  private readonly setup: HTMLFormElement;
  private readonly keyInput: HTMLInputElement;
  private readonly modelSelect: HTMLSelectElement;
  private readonly wordLimitInput: HTMLInputElement;
  private readonly exportButton: HTMLButtonElement;

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient,
    private readonly saveFile: (name: string, content: string) => void = downloadText,
  ) {
    this.root = container;
    container.classList.add("chat-panel");
    container.innerHTML = `
      <h2>Chat</h2>
      <p class="chat-disabled-note">Run a reduction or open an example to start chatting.</p>
      <form class="chat-setup" hidden>
        <label>Provider
          <select name="provider">
            <option value="http">OpenAI-compatible API</option>
            <option value="mock">Offline mock (no key needed)</option>
          </select>
        </label>
        <label>Model
          <select name="model">
            <option value="gpt-3.5-turbo">gpt-3.5-turbo</option>
            <option value="gpt-4">gpt-4</option>
            <option value="gpt-3.5-turbo-instruct">legacy (3-class)</option>
          </select>
        </label>
        <label>API key <input type="password" name="api_key" placeholder="sk-..."></label>
        <label>Word limit <input type="number" name="word_limit" value="80" min="1"></label>
        <button type="submit">Start chat</button>
      </form>
      <div class="chat-banner" role="alert" hidden></div>
      <div class="chat-transcript"></div>
      <form class="chat-ask" hidden>
        <input type="text" name="question" placeholder="Ask about the results..." autocomplete="off">
        <button type="submit">Send</button>
      </form>
      <div class="chat-tools" hidden>
        <button type="button" class="chat-export">Download session</button>
      </div>
    `;
    this.transcript = container.querySelector(".chat-transcript") as HTMLElement;
    this.banner = container.querySelector(".chat-banner") as HTMLElement;
    this.form = container.querySelector(".chat-ask") as HTMLFormElement;
    this.input = this.form.querySelector("input") as HTMLInputElement;
    this.send = this.form.querySelector("button") as HTMLButtonElement;
    this.setup = container.querySelector(".chat-setup") as HTMLFormElement;
    this.keyInput = this.setup.querySelector("[name=api_key]") as HTMLInputElement;
    this.modelSelect = this.setup.querySelector("[name=model]") as HTMLSelectElement;
    this.wordLimitInput = this.setup.querySelector("[name=word_limit]") as HTMLInputElement;
    this.exportButton = container.querySelector(".chat-export") as HTMLButtonElement;

    this.setup.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.start();
    });
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.ask();
    });
    this.exportButton.addEventListener("click", () => void this.export());
  }

  /** Enable the panel for a finished run or an example (a result exists). */
  enableFor(target: ChatTarget): void {
    this.target = target;
    this.sessionId = null;
    this.transcript.innerHTML = "";
    this.hideBanner();
    (this.root.querySelector(".chat-disabled-note") as HTMLElement).hidden = true;
    this.setup.hidden = false;
    this.form.hidden = true;
    (this.root.querySelector(".chat-tools") as HTMLElement).hidden = true;
  }

  get inFlight(): boolean {
    return this.busy;
  }

  private providerChoice(): ProviderChoice {
    const provider = (this.setup.querySelector("[name=provider]") as HTMLSelectElement)
      .value as "http" | "mock";
    return {
      provider,
      apiKey: this.keyInput.value.trim(),
      modelId: this.modelSelect.value,
      wordLimit: Number(this.wordLimitInput.value) || 80,
    };
  }

  async start(): Promise<void> {
    if (!this.target || this.busy) return;
    const choice = this.providerChoice();
    this.setBusy(true);
    this.hideBanner();
    try {
      const session = await this.api.createSession({
        job_id: this.target.jobId,
        example_id: this.target.exampleId,
        provider: choice.provider,
        api_key: choice.apiKey || undefined,
        model_id: choice.modelId,
        word_limit: choice.wordLimit,
      });
      this.sessionId = session.session_id;
      this.renderMessages(session.messages);
      this.setup.hidden = true;
      this.form.hidden = false;
      (this.root.querySelector(".chat-tools") as HTMLElement).hidden = false;
    } catch (error) {
      this.showError(error);
    } finally {
      this.setBusy(false);
    }
  }

  async ask(question?: string): Promise<void> {
    if (!this.sessionId || this.busy) return;
    const text = (question ?? this.input.value).trim();
    if (!text) return;
    this.setBusy(true);
    this.hideBanner();
    try {
      const reply = await this.api.sendMessage(this.sessionId, text);
      this.renderMessages(reply.messages);
      this.input.value = "";
    } catch (error) {
      this.showError(error);
    } finally {
      this.setBusy(false);
    }
  }

  async export(): Promise<void> {
    if (!this.sessionId) return;
    const payload = await this.api.exportSession(this.sessionId);
    this.saveFile("gp4nldr-session.json", payload);
  }

  async importArchive(archiveJson: string, provider: "http" | "mock" = "mock"): Promise<void> {
    this.hideBanner();
    try {
      const session = await this.api.importSession(
        archiveJson,
        provider,
        this.keyInput.value.trim() || undefined,
      );
      this.sessionId = session.session_id;
      this.target = {};
      (this.root.querySelector(".chat-disabled-note") as HTMLElement).hidden = true;
      this.setup.hidden = true;
      this.form.hidden = false;
      (this.root.querySelector(".chat-tools") as HTMLElement).hidden = false;
      this.renderMessages(session.messages);
    } catch (error) {
      this.showError(error);
    }
  }

  private setBusy(busy: boolean): void {
    this.busy = busy;
    this.input.disabled = busy;
    this.send.disabled = busy;
    (this.setup.querySelector("button") as HTMLButtonElement).disabled = busy;
  }

  private renderMessages(messages: ChatMessage[]): void {
    this.transcript.innerHTML = "";
    for (const message of messages) {
      const bubble = document.createElement("div");
      bubble.className = `bubble bubble-${message.role}`;
      bubble.textContent = message.text;
      this.transcript.appendChild(bubble);
    }
  }

  private showError(error: unknown): void {
    const code = error instanceof ApiError ? error.code : "provider_error";
    this.banner.textContent =
      ERROR_BANNERS[code] ?? (error instanceof Error ? error.message : String(error));
    this.banner.hidden = false;
    if (code === "auth_failure") {
      this.setup.hidden = false;  // re-open the key form
      this.form.hidden = true;
    }
  }

  private hideBanner(): void {
    this.banner.hidden = true;
    this.banner.textContent = "";
  }
}

function downloadText(name: string, content: string): void {
  const blob = new Blob([content], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = name;
  anchor.click();
  URL.revokeObjectURL(url);
}
