/**
 * Looped playback of the texture previews.
 *
 * A held selection keeps its sound looping, standing in for continuous
 * sliding over the surface; selecting another texture swaps the loop.
 * An optional masking-noise track can run underneath. Playback failures
 * (autoplay policy, test DOM) are swallowed: sound is an aid here, never
 * state the protocol depends on.
 */
export class AudioController {
  private texture: HTMLAudioElement | null = null;
  private masking: HTMLAudioElement | null = null;

  constructor(
    private createElement: () => HTMLAudioElement = () => new Audio(),
  ) {}

  playTexture(url: string): void {
    if (this.texture && this.texture.src === url) return; // already looping
    this.stopTexture();
    const el = this.createElement();
    el.src = url;
    el.loop = true;
    this.texture = el;
    tryPlay(el);
  }

  stopTexture(): void {
    if (this.texture) {
      this.texture.pause();
      this.texture = null;
    }
  }

  /** returns the new masking state */
  toggleMasking(url: string): boolean {
    if (this.masking) {
      this.masking.pause();
      this.masking = null;
      return false;
    }
    const el = this.createElement();
    el.src = url;
    el.loop = true;
    this.masking = el;
    tryPlay(el);
    return true;
  }

  stopAll(): void {
    this.stopTexture();
    if (this.masking) {
      this.masking.pause();
      this.masking = null;
    }
  }
}

function tryPlay(el: HTMLAudioElement): void {
  try {
    const p = el.play() as Promise<void> | undefined;
    if (p && typeof p.catch === 'function') p.catch(() => {});
  } catch {
    // no playback in this environment
  }
}
