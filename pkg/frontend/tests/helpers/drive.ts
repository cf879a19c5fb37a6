import { expect } from 'vitest';
import { AudioController } from '../../src/audio.js';
import type { ServiceClient } from '../../src/api.js';
import type { App } from '../../src/main.js';
import type { CommittedRound, SessionSnapshot } from '../../src/types.js';

export function fakeAudio(): { controller: AudioController; played: string[] } {
  const played: string[] = [];
  const controller = new AudioController(() => {
    const el: any = {
      src: '',
      loop: false,
      paused: false,
      play() {
        played.push(el.src);
        return Promise.resolve();
      },
      pause() {
        el.paused = true;
      },
    };
    return el as HTMLAudioElement;
  });
  return { controller, played };
}

const tick = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

/** wait for the mutation queue to drain and renders to settle */
export async function settle(client: ServiceClient): Promise<void> {
  for (let i = 0; i < 2000 && client.pendingMutations() > 0; i++) await tick();
  await tick();
  await tick();
}

export function query<T extends HTMLElement>(root: HTMLElement, selector: string): T {
  const el = root.querySelector<T>(selector);
  if (!el) throw new Error(`missing element: ${selector}`);
  return el;
}

export function queryAll<T extends HTMLElement>(
  root: HTMLElement,
  selector: string,
): T[] {
  return [...root.querySelectorAll<T>(selector)];
}

function submitForm(form: HTMLFormElement): void {
  form.dispatchEvent(new window.Event('submit', { bubbles: true, cancelable: true }));
}

/** round 1 through the DOM: three textures per lettered group */
export async function playRoundOne(
  app: App,
  client: ServiceClient,
  root: HTMLElement,
  groupCount = 8,
): Promise<void> {
  const total = app.ui!.snapshot.display_order.length;
  const labels = 'ABCDEFGHIJKL'.slice(0, groupCount);
  const perGroup = Math.ceil(total / groupCount);
  for (let i = 0; i < total; i++) {
    const buttons = queryAll<HTMLButtonElement>(root, '.texture-grid .texture');
    buttons[i].click(); // select, starts the loop
    const target = labels[Math.floor(i / perGroup)];
    query<HTMLElement>(root, `.group-panel[data-group-id="${target}"]`).click();
  }
  await settle(client);
  const commit = query<HTMLButtonElement>(root, '.commit');
  expect(commit.disabled).toBe(false);
  commit.click();
  await settle(client);
}

/** merge pairs until the given group count remains, then commit */
export async function playMergeRound(
  client: ServiceClient,
  root: HTMLElement,
  targetCount: number,
): Promise<void> {
  for (;;) {
    const panels = queryAll<HTMLElement>(root, '.merge-group');
    if (panels.length <= targetCount) break;
    const source = panels[panels.length - 1].dataset.groupId!;
    const target = panels[panels.length - 2].dataset.groupId!;
    query<HTMLElement>(root, `.merge-group[data-group-id="${source}"]`).click();
    query<HTMLElement>(root, `.merge-group[data-group-id="${target}"]`).click();
    await settle(client);
  }
  query<HTMLButtonElement>(root, '.commit').click();
  await settle(client);
}

export async function playNaming(
  client: ServiceClient,
  root: HTMLElement,
  nameFor: (groupId: string) => string,
): Promise<void> {
  for (const input of queryAll<HTMLInputElement>(root, '.naming-row input')) {
    input.value = nameFor(input.name);
  }
  submitForm(query<HTMLFormElement>(root, '.naming-form'));
  await settle(client);
}

/** a complete 3-round session driven exclusively through DOM events */
export async function completeSession(
  app: App,
  client: ServiceClient,
  root: HTMLElement,
  nameFor: (groupId: string, round: number) => string = (gid, round) =>
    `group ${gid} round ${round}`,
): Promise<SessionSnapshot> {
  await playRoundOne(app, client, root, 8);
  expect(app.ui!.snapshot.current_round).toBe(2);

  await playMergeRound(client, root, 4);
  expect(app.ui!.snapshot.state).toBe('naming');
  await playNaming(client, root, (gid) => nameFor(gid, 2));
  expect(app.ui!.snapshot.current_round).toBe(3);

  await playMergeRound(client, root, 2);
  expect(app.ui!.snapshot.state).toBe('naming');
  await playNaming(client, root, (gid) => nameFor(gid, 3));
  expect(app.ui!.snapshot.state).toBe('complete');
  return app.ui!.snapshot;
}

/** the protocol invariants a finished session must satisfy */
export function checkSessionInvariants(
  snapshot: SessionSnapshot,
  textureIds: number[],
): void {
  expect(snapshot.rounds.length).toBeGreaterThanOrEqual(2);
  expect(snapshot.rounds.length).toBeLessThanOrEqual(3);
  const expected = [...textureIds].sort((a, b) => a - b);
  let previousCount = Infinity;
  snapshot.rounds.forEach((round, index) => {
    expect(round.round).toBe(index + 1);
    const members = Object.values(round.groups)
      .flat()
      .sort((a, b) => a - b);
    expect(members).toEqual(expected); // each round is a partition
    const count = Object.keys(round.groups).length;
    expect(count).toBeLessThanOrEqual(previousCount);
    previousCount = count;
    if (round.round >= 2) {
      expect(Object.keys(round.names).sort()).toEqual(
        Object.keys(round.groups).sort(),
      );
    }
  });
}

/**
 * Pair scores from the committed rounds: a pair earns 4 - r points for the
 * earliest round r in which the two textures shared a group, 0 if never.
 */
export function pairPoints(
  rounds: CommittedRound[],
  textureIds: number[],
): Map<string, number> {
  const groupOf = rounds.map((round) => {
    const map = new Map<number, string>();
    for (const [gid, members] of Object.entries(round.groups)) {
      for (const member of members) map.set(member, gid);
    }
    return map;
  });
  const points = new Map<string, number>();
  for (let i = 0; i < textureIds.length; i++) {
    for (let j = i + 1; j < textureIds.length; j++) {
      const a = textureIds[i];
      const b = textureIds[j];
      let score = 0;
      for (const [index, map] of groupOf.entries()) {
        if (map.get(a) === map.get(b)) {
          score = 4 - rounds[index].round;
          break;
        }
      }
      points.set(`${a},${b}`, score);
    }
  }
  return points;
}
