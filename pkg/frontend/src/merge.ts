import { banner } from './board.js';
import { mergeTarget, workingGroups } from './state.js';
import type { UiState } from './state.js';
import type { TextureInfo } from './types.js';

export interface MergeHandlers {
  onSelectTexture(textureId: number): void;
  onSelectGroup(groupId: string): void;
  onMerge(source: string, target: string): void;
  onCommit(): void;
  onToggleMasking(): void;
}

/**
 * Rounds 2 and 3 work on whole groups: pick one group, then click another
 * to pour the first into the second. The running count is shown against
 * the "roughly half" suggestion; the suggestion is advisory, commit is
 * allowed at any group count the server accepts.
 */
export function renderMerge(
  root: HTMLElement,
  ui: UiState,
  textures: TextureInfo[],
  handlers: MergeHandlers,
): void {
  const snapshot = ui.snapshot;
  root.innerHTML = '';
  root.appendChild(banner(ui));

  const groups = workingGroups(snapshot);
  const previous = snapshot.rounds[snapshot.rounds.length - 1];
  const target = mergeTarget(Object.keys(previous.groups).length);
  const labelOf = new Map(textures.map((t) => [t.id, t.label]));

  const counter = document.createElement('p');
  counter.className = 'merge-counter';
  counter.textContent = `${groups.size} groups (aim for about ${target})`;
  root.appendChild(counter);

  const panels = document.createElement('div');
  panels.className = 'merge-panels';
  for (const [gid, members] of groups) {
    const panel = document.createElement('div');
    panel.className = 'merge-group';
    panel.dataset.groupId = gid;
    if (ui.selectedGroup === gid) panel.classList.add('selected');

    const heading = document.createElement('h3');
    heading.textContent = gid;
    panel.appendChild(heading);

    const list = document.createElement('div');
    list.className = 'merge-members';
    for (const member of members) {
      const play = document.createElement('button');
      play.type = 'button';
      play.className = 'texture';
      play.dataset.textureId = String(member);
      play.textContent = labelOf.get(member) ?? `T?${member}`;
      if (ui.selectedTexture === member) play.classList.add('selected');
      play.addEventListener('click', (event) => {
        event.stopPropagation();
        handlers.onSelectTexture(member);
      });
      list.appendChild(play);
    }
    panel.appendChild(list);

    panel.addEventListener('click', () => {
      if (ui.selectedGroup === null || ui.selectedGroup === gid) {
        handlers.onSelectGroup(gid);
      } else {
        handlers.onMerge(ui.selectedGroup, gid);
      }
    });
    panels.appendChild(panel);
  }
  root.appendChild(panels);

  const footer = document.createElement('div');
  footer.className = 'footer';

  const masking = document.createElement('button');
  masking.type = 'button';
  masking.className = 'masking-toggle';
  masking.textContent = ui.maskingOn
    ? 'background noise: on'
    : 'background noise: off';
  masking.addEventListener('click', () => handlers.onToggleMasking());
  footer.appendChild(masking);

  const hint = document.createElement('span');
  hint.className = 'merge-hint';
  hint.textContent = ui.selectedGroup
    ? `group ${ui.selectedGroup} selected: click another group to combine`
    : 'click a group to select it';
  footer.appendChild(hint);

  const commit = document.createElement('button');
  commit.type = 'button';
  commit.className = 'commit';
  commit.textContent = 'Finish round';
  commit.addEventListener('click', () => handlers.onCommit());
  footer.appendChild(commit);
  root.appendChild(footer);
}
