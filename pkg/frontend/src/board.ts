import { allAssigned, groupLabels, roundBanner, unassignedCount, workingGroups } from './state.js';
import type { UiState } from './state.js';
import type { TextureInfo } from './types.js';

export interface BoardHandlers {
  onSelect(textureId: number): void;
  onAssign(textureId: number, groupId: string): void;
  onUnassign(textureId: number): void;
  onCommit(): void;
  onToggleMasking(): void;
}

/**
 * Round-1 board: texture grid on the left, lettered group panels on the
 * right. Selecting a texture starts its loop; clicking a panel files the
 * selected texture there. Assignments post immediately, the last click
 * wins, and commit stays disabled until every texture is somewhere.
 */
export function renderBoard(
  root: HTMLElement,
  ui: UiState,
  textures: TextureInfo[],
  handlers: BoardHandlers,
): void {
  const snapshot = ui.snapshot;
  root.innerHTML = '';
  root.appendChild(banner(ui));

  const layout = div('board');
  const grid = div('texture-grid');
  const byId = new Map(textures.map((t) => [t.id, t]));

  for (const texture of textures) {
    const button = document.createElement('button');
    button.type = 'button';
    button.className = 'texture';
    button.dataset.textureId = String(texture.id);
    button.textContent = texture.label;
    const assignedTo = snapshot.working[String(texture.id)];
    if (assignedTo) {
      button.classList.add('assigned');
      const badge = document.createElement('span');
      badge.className = 'badge';
      badge.textContent = assignedTo;
      button.appendChild(badge);
    }
    if (ui.selectedTexture === texture.id) button.classList.add('selected');
    button.addEventListener('click', () => handlers.onSelect(texture.id));
    grid.appendChild(button);
  }
  layout.appendChild(grid);

  const panels = div('group-panels');
  const groups = workingGroups(snapshot);
  for (const label of groupLabels(snapshot.group_slots)) {
    const panel = div('group-panel');
    panel.dataset.groupId = label;
    const heading = document.createElement('h3');
    heading.textContent = label;
    panel.appendChild(heading);

    for (const member of groups.get(label) ?? []) {
      panel.appendChild(
        chip(byId.get(member), member, handlers),
      );
    }
    panel.addEventListener('click', (event) => {
      // chips handle their own clicks
      if ((event.target as HTMLElement).closest('.chip')) return;
      if (ui.selectedTexture !== null) {
        handlers.onAssign(ui.selectedTexture, label);
      }
    });
    panels.appendChild(panel);
  }
  layout.appendChild(panels);
  root.appendChild(layout);
  root.appendChild(footer(ui, handlers));
}

function chip(
  texture: TextureInfo | undefined,
  textureId: number,
  handlers: BoardHandlers,
): HTMLElement {
  const wrap = document.createElement('span');
  wrap.className = 'chip';
  wrap.dataset.textureId = String(textureId);

  const select = document.createElement('button');
  select.type = 'button';
  select.className = 'chip-label';
  select.textContent = texture ? texture.label : `T?${textureId}`;
  select.addEventListener('click', () => handlers.onSelect(textureId));
  wrap.appendChild(select);

  const remove = document.createElement('button');
  remove.type = 'button';
  remove.className = 'chip-remove';
  remove.textContent = '×';
  remove.title = 'remove from group';
  remove.addEventListener('click', () => handlers.onUnassign(textureId));
  wrap.appendChild(remove);
  return wrap;
}

export function banner(ui: UiState): HTMLElement {
  const el = div('banner');
  const text = document.createElement('p');
  text.className = 'round-banner';
  text.textContent = roundBanner(ui.snapshot);
  el.appendChild(text);
  if (ui.offlineNotice) {
    const notice = div('offline-notice');
    notice.textContent = ui.offlineNotice;
    el.appendChild(notice);
  }
  if (ui.commitWarning) {
    const warn = div('commit-warning');
    warn.textContent = ui.commitWarning;
    el.appendChild(warn);
  }
  return el;
}

function footer(ui: UiState, handlers: BoardHandlers): HTMLElement {
  const el = div('footer');

  const masking = document.createElement('button');
  masking.type = 'button';
  masking.className = 'masking-toggle';
  masking.textContent = ui.maskingOn
    ? 'background noise: on'
    : 'background noise: off';
  masking.addEventListener('click', () => handlers.onToggleMasking());
  el.appendChild(masking);

  const remaining = unassignedCount(ui.snapshot);
  const status = document.createElement('span');
  status.className = 'assign-status';
  status.textContent =
    remaining === 0 ? 'all sounds grouped' : `${remaining} left to group`;
  el.appendChild(status);

  const commit = document.createElement('button');
  commit.type = 'button';
  commit.className = 'commit';
  commit.textContent = 'Finish round';
  commit.disabled = !allAssigned(ui.snapshot);
  commit.addEventListener('click', () => handlers.onCommit());
  el.appendChild(commit);
  return el;
}

function div(className: string): HTMLDivElement {
  const el = document.createElement('div');
  el.className = className;
  return el;
}
