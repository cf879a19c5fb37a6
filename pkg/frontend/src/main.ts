import { ApiError, ServiceClient } from './api.js';
import { AudioController } from './audio.js';
import { renderBoard } from './board.js';
import { renderMerge } from './merge.js';
import { renderNaming } from './naming.js';
import { initialUiState, isMergeRound, workingGroups } from './state.js';
import type { UiState } from './state.js';
import type { SessionSnapshot, TextureInfo } from './types.js';

const STORAGE_KEY = 'grouping-session-id';

export interface AppOptions {
  audio?: AudioController;
  confirmBlank?: (groups: string[]) => boolean;
  storage?: Pick<Storage, 'getItem' | 'setItem' | 'removeItem'>;
}

/**
 * Orchestrates one participant's run. The server snapshot is the source
 * of truth: every handler applies the participant's action optimistically,
 * posts it, then replaces local state with the server's answer. Refreshing
 * the page restores the session from the stored id.
 */
export class App {
  ui: UiState | null = null;
  textures: TextureInfo[] = [];
  private audio: AudioController;
  private confirmBlankFn: (groups: string[]) => boolean;
  private storage: AppOptions['storage'];

  constructor(
    private root: HTMLElement,
    private client: ServiceClient,
    opts: AppOptions = {},
  ) {
    this.audio = opts.audio ?? new AudioController();
    this.confirmBlankFn =
      opts.confirmBlank ??
      ((groups) =>
        window.confirm(
          `Groups ${groups.join(', ')} have no name yet. Save anyway?`,
        ));
    this.storage = opts.storage;
  }

  async start(participantId: string): Promise<void> {
    const snapshot = await this.client.createSession(participantId);
    this.storage?.setItem(STORAGE_KEY, snapshot.session_id);
    await this.adopt(snapshot);
  }

  /** try to pick up the session a refresh interrupted */
  async restore(): Promise<boolean> {
    const sessionId = this.storage?.getItem(STORAGE_KEY);
    if (!sessionId) return false;
    try {
      await this.adopt(await this.client.session(sessionId));
      return true;
    } catch {
      this.storage?.removeItem(STORAGE_KEY);
      return false;
    }
  }

  private async adopt(snapshot: SessionSnapshot): Promise<void> {
    this.textures = await this.client.textures(snapshot.session_id);
    this.ui = initialUiState(snapshot);
    this.render();
  }

  setOffline(notice: string | null): void {
    if (!this.ui) return;
    this.ui.offlineNotice = notice;
    this.render();
  }

  render(): void {
    if (!this.ui) return;
    const ui = this.ui;
    switch (ui.snapshot.state) {
      case 'naming':
        renderNaming(this.root, ui, this.textures, {
          onSubmit: (names) => void this.submitNames(names),
          confirmBlank: (groups) => this.confirmBlankFn(groups),
        });
        break;
      case 'complete':
        this.renderComplete();
        break;
      default:
        if (isMergeRound(ui.snapshot)) {
          renderMerge(this.root, ui, this.textures, {
            onSelectTexture: (tid) => this.select(tid),
            onSelectGroup: (gid) => {
              ui.selectedGroup = ui.selectedGroup === gid ? null : gid;
              this.render();
            },
            onMerge: (source, target) => void this.merge(source, target),
            onCommit: () => void this.commit(),
            onToggleMasking: () => this.toggleMasking(),
          });
        } else {
          renderBoard(this.root, ui, this.textures, {
            onSelect: (tid) => this.select(tid),
            onAssign: (tid, gid) => void this.assign(tid, gid),
            onUnassign: (tid) => void this.assign(tid, null),
            onCommit: () => void this.commit(),
            onToggleMasking: () => this.toggleMasking(),
          });
        }
    }
  }

  private renderComplete(): void {
    this.root.innerHTML = '';
    const done = document.createElement('div');
    done.className = 'complete';
    const heading = document.createElement('h2');
    heading.textContent = 'All done. Thank you!';
    done.appendChild(heading);
    const rounds = this.ui!.snapshot.rounds;
    const names = rounds[rounds.length - 1]?.names ?? {};
    const list = document.createElement('ul');
    for (const [gid, name] of Object.entries(names)) {
      const item = document.createElement('li');
      item.textContent = name ? `${gid}: ${name}` : gid;
      list.appendChild(item);
    }
    done.appendChild(list);
    this.root.appendChild(done);
    this.audio.stopAll();
  }

  private select(textureId: number): void {
    const ui = this.ui!;
    ui.selectedTexture = ui.selectedTexture === textureId ? null : textureId;
    if (ui.selectedTexture === null) {
      this.audio.stopTexture();
    } else {
      const texture = this.textures.find((t) => t.id === textureId);
      if (texture) this.audio.playTexture(this.client.audioUrl(texture));
    }
    this.render();
  }

  private async assign(textureId: number, groupId: string | null): Promise<void> {
    const ui = this.ui!;
    if (groupId === null) {
      delete ui.snapshot.working[String(textureId)];
    } else {
      ui.snapshot.working[String(textureId)] = groupId;
    }
    ui.selectedTexture = null;
    this.audio.stopTexture();
    this.render();
    try {
      ui.snapshot = await this.client.assign(
        ui.snapshot.session_id,
        textureId,
        groupId,
      );
    } catch (err) {
      ui.commitWarning = describe(err);
    }
    this.render();
  }

  private async merge(source: string, target: string): Promise<void> {
    const ui = this.ui!;
    const members = workingGroups(ui.snapshot).get(source) ?? [];
    ui.selectedGroup = null;
    for (const member of members) {
      ui.snapshot.working[String(member)] = target;
    }
    this.render();
    try {
      // enqueue the whole batch before yielding, otherwise a commit click
      // could slip into the queue between two of the moves
      const posts = members.map((member) =>
        this.client.assign(ui.snapshot.session_id, member, target),
      );
      const snapshots = await Promise.all(posts);
      const last = snapshots[snapshots.length - 1];
      if (last) ui.snapshot = last;
    } catch (err) {
      ui.commitWarning = describe(err);
    }
    this.render();
  }

  private async commit(): Promise<void> {
    const ui = this.ui!;
    try {
      const response = await this.client.commitRound(ui.snapshot.session_id);
      ui.snapshot = response;
      ui.commitWarning = response.warning;
      ui.selectedTexture = null;
      ui.selectedGroup = null;
      this.audio.stopTexture();
    } catch (err) {
      ui.commitWarning = describe(err);
    }
    this.render();
  }

  private async submitNames(names: Record<string, string>): Promise<void> {
    const ui = this.ui!;
    try {
      ui.snapshot = await this.client.submitNames(
        ui.snapshot.session_id,
        names,
      );
      ui.commitWarning = null;
    } catch (err) {
      ui.commitWarning = describe(err);
    }
    this.render();
  }

  private toggleMasking(): void {
    const ui = this.ui!;
    ui.maskingOn = this.audio.toggleMasking(this.client.maskingUrl());
    this.render();
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return typeof err.detail === 'string'
      ? err.detail
      : JSON.stringify(err.detail);
  }
  return String(err);
}

/** entry point for the real page; tests construct App directly */
export function boot(): void {
  const root = document.getElementById('app');
  if (!root) return;

  const client = new ServiceClient('', {
    onOffline: (label, attempt) =>
      app.setOffline(`reconnecting (${label}, try ${attempt})...`),
    onOnline: () => app.setOffline(null),
  });
  const app = new App(root, client, { storage: window.sessionStorage });

  void app.restore().then((restored) => {
    if (restored) return;
    root.innerHTML = '';
    const form = document.createElement('form');
    form.className = 'join-form';
    const input = document.createElement('input');
    input.type = 'text';
    input.placeholder = 'participant id';
    const button = document.createElement('button');
    button.type = 'submit';
    button.textContent = 'Start';
    form.appendChild(input);
    form.appendChild(button);
    form.addEventListener('submit', (event) => {
      event.preventDefault();
      if (input.value.trim()) void app.start(input.value.trim());
    });
    root.appendChild(form);
  });
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  boot();
}
