/** Keyboard shortcuts: 1-9, 0, and "-" toggle the 11 labels in schema order. */

import { SHORTCUT_KEYS } from "./render";

/** Map a keypress to a label index, or null when it isn't a label key. */
export function labelIndexForKey(key: string): number | null {
  const index = SHORTCUT_KEYS.indexOf(key);
  return index === -1 ? null : index;
}

export interface KeyboardActions {
  onToggle: (labelIndex: number) => void;
  onNext: () => void;
  onPrevious: () => void;
  onSubmit: () => void;
}

/** Returns a keydown handler; ignores keys while typing in form fields. */
export function makeKeydownHandler(actions: KeyboardActions) {
  return (event: KeyboardEvent): void => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) {
      return;
    }
    const labelIndex = labelIndexForKey(event.key);
    if (labelIndex !== null) {
      event.preventDefault();
      actions.onToggle(labelIndex);
      return;
    }
    switch (event.key) {
      case "ArrowRight":
      case "n":
        event.preventDefault();
        actions.onNext();
        break;
      case "ArrowLeft":
      case "p":
        event.preventDefault();
        actions.onPrevious();
        break;
      case "Enter":
        event.preventDefault();
        actions.onSubmit();
        break;
    }
  };
}
