// Form state: the seven record fields plus derived option lists and
// validation. Changing the method snaps the key size to the nearest valid
// value so the form can never describe an impossible pairing.

import { isSubmittable, keySizesFor, validateRecord } from "./domain.js";
import type { FieldViolation } from "./domain.js";
import type { RecordField, SystemRecord } from "./types.js";

export const DEFAULT_RECORD: SystemRecord = {
  system_type: "payment_processing",
  security_lifetime: 15,
  crypto_method: "RSA",
  key_size: 2048,
  system_complexity: 3,
  integration_complexity: 4,
  data_sensitivity: 4,
};

export class FormState {
  private record: SystemRecord;

  constructor(initial: SystemRecord = DEFAULT_RECORD) {
    this.record = { ...initial };
  }

  current(): SystemRecord {
    return { ...this.record };
  }

  keySizeOptions(): number[] {
    return keySizesFor(this.record.crypto_method);
  }

  violations(): FieldViolation[] {
    return validateRecord(this.record);
  }

  submittable(): boolean {
    return isSubmittable(this.record);
  }

  set(field: RecordField, raw: string | number): SystemRecord {
    if (field === "system_type" || field === "crypto_method") {
      this.record = { ...this.record, [field]: String(raw) };
      if (field === "crypto_method") {
        this.record.key_size = snapKeySize(this.record.crypto_method, this.record.key_size);
      }
    } else {
      this.record = { ...this.record, [field]: Number(raw) };
    }
    return this.current();
  }

  load(record: SystemRecord): SystemRecord {
    this.record = { ...record };
    return this.current();
  }
}

/** Closest valid key size for the method (ties resolve upward). */
export function snapKeySize(method: string, previous: number): number {
  const sizes = keySizesFor(method);
  if (sizes.length === 0) return previous;
  if (sizes.includes(previous)) return previous;
  let best = sizes[0];
  for (const size of sizes) {
    if (Math.abs(size - previous) < Math.abs(best - previous)) best = size;
    else if (Math.abs(size - previous) === Math.abs(best - previous) && size > best) best = size;
  }
  return best;
}
