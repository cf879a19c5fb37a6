// Wire types mirroring the session service JSON, field for field.

export type SessionState = 'training' | 'grouping' | 'naming' | 'complete';

export interface TextureInfo {
  id: number;
  /** Positional label like "T07". Never a parameter value: participants stay blind. */
  label: string;
  audio_url: string;
}

export interface CommittedRound {
  round: number;
  groups: Record<string, number[]>;
  names: Record<string, string>;
}

export interface SessionSnapshot {
  session_id: string;
  participant_id: string;
  state: SessionState;
  current_round: number;
  display_order: number[];
  group_slots: number;
  /** texture id (serialized as string) -> group label */
  working: Record<string, string>;
  rounds: CommittedRound[];
}

export interface CommitResponse extends SessionSnapshot {
  warning: string | null;
}
