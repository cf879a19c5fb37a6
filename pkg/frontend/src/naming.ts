import { banner } from './board.js';
import type { UiState } from './state.js';
import type { TextureInfo } from './types.js';

export interface NamingHandlers {
  onSubmit(names: Record<string, string>): void;
  /** asked once when some names are blank; true means submit anyway */
  confirmBlank(blankGroups: string[]): boolean;
}

/** One text field per remaining group, submitted in a single post. */
export function renderNaming(
  root: HTMLElement,
  ui: UiState,
  textures: TextureInfo[],
  handlers: NamingHandlers,
): void {
  const snapshot = ui.snapshot;
  root.innerHTML = '';
  root.appendChild(banner(ui));

  const lastRound = snapshot.rounds[snapshot.rounds.length - 1];
  const labelOf = new Map(textures.map((t) => [t.id, t.label]));

  const form = document.createElement('form');
  form.className = 'naming-form';

  const fields = new Map<string, HTMLInputElement>();
  for (const [gid, members] of Object.entries(lastRound.groups)) {
    const row = document.createElement('div');
    row.className = 'naming-row';
    row.dataset.groupId = gid;

    const label = document.createElement('label');
    label.textContent = `${gid} (${members
      .map((m) => labelOf.get(m) ?? `T?${m}`)
      .join(', ')})`;
    label.htmlFor = `name-${gid}`;
    row.appendChild(label);

    const input = document.createElement('input');
    input.type = 'text';
    input.id = `name-${gid}`;
    input.name = gid;
    input.placeholder = 'name or short phrase';
    fields.set(gid, input);
    row.appendChild(input);
    form.appendChild(row);
  }

  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.className = 'submit-names';
  submit.textContent = 'Save names';
  form.appendChild(submit);

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const names: Record<string, string> = {};
    for (const [gid, input] of fields) names[gid] = input.value;
    const blank = Object.entries(names)
      .filter(([, name]) => name.trim() === '')
      .map(([gid]) => gid);
    if (blank.length > 0 && !handlers.confirmBlank(blank)) {
      return; // participant went back to fill them in
    }
    handlers.onSubmit(names);
  });

  root.appendChild(form);
}
