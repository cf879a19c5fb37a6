import type { SessionSnapshot } from './types.js';

const ALPHABET = 'ABCDEFGHIJKLMNOPQRSTUVWX';

export function groupLabels(slots: number): string[] {
  return ALPHABET.slice(0, slots).split('');
}

/** working map inverted to label -> sorted member ids */
export function workingGroups(snapshot: SessionSnapshot): Map<string, number[]> {
  const groups = new Map<string, number[]>();
  for (const [tid, gid] of Object.entries(snapshot.working)) {
    const members = groups.get(gid) ?? [];
    members.push(Number(tid));
    groups.set(gid, members);
  }
  for (const members of groups.values()) members.sort((a, b) => a - b);
  return new Map([...groups.entries()].sort());
}

export function allAssigned(snapshot: SessionSnapshot): boolean {
  return Object.keys(snapshot.working).length === snapshot.display_order.length;
}

export function unassignedCount(snapshot: SessionSnapshot): number {
  return snapshot.display_order.length - Object.keys(snapshot.working).length;
}

/**
 * Suggested group count for a merge round: half the previous round,
 * floored at 2. Uses round-half-to-even to agree with the service's
 * advisory warning, so the number we display is the one it checks.
 */
export function mergeTarget(previousCount: number): number {
  return Math.max(2, roundHalfEven(previousCount / 2));
}

function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  const frac = x - floor;
  if (frac > 0.5) return floor + 1;
  if (frac < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

export function isMergeRound(snapshot: SessionSnapshot): boolean {
  return snapshot.state === 'grouping' && snapshot.current_round >= 2;
}

export function roundBanner(snapshot: SessionSnapshot): string {
  switch (snapshot.state) {
    case 'training':
      return 'Warm-up: play a few sounds, then start sorting them into groups.';
    case 'grouping': {
      if (snapshot.current_round === 1) {
        return 'Round 1 of 3: group sounds that feel similar to you.';
      }
      const previous = snapshot.rounds[snapshot.rounds.length - 1];
      const count = Object.keys(previous.groups).length;
      return (
        `Round ${snapshot.current_round} of 3: combine similar groups ` +
        `(aim for about ${mergeTarget(count)}).`
      );
    }
    case 'naming':
      return 'Give each of your groups a name or a short phrase.';
    case 'complete':
      return 'All done. Thank you!';
  }
}

/** everything the render layer needs beyond the server snapshot */
export interface UiState {
  snapshot: SessionSnapshot;
  selectedTexture: number | null;
  selectedGroup: string | null;
  offlineNotice: string | null;
  commitWarning: string | null;
  maskingOn: boolean;
}

export function initialUiState(snapshot: SessionSnapshot): UiState {
  return {
    snapshot,
    selectedTexture: null,
    selectedGroup: null,
    offlineNotice: null,
    commitWarning: null,
    maskingOn: false,
  };
}
