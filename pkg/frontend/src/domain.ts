// Client-side mirror of the server's record constraints. The form only
// submits records that pass these checks, so a submittable form always
// gets a 200 from /predict.

import type { RecordField, SystemRecord } from "./types.js";

export const SYSTEM_TYPES = [
  "payment_processing",
  "secure_messaging",
  "certificate_authority",
  "healthcare_records",
  "military_communications",
  "government_infrastructure",
  "internet_banking",
  "e_commerce",
  "cloud_service",
  "iot_device",
  "embedded_system",
  "weather_forecasting",
  "wireless_network",
] as const;

export const CRYPTO_METHODS = [
  "RSA",
  "ECC",
  "DH",
  "TRIPLE_DES",
  "AES",
  "HYBRID_RSA_PQC",
  "HYBRID_ECC_PQC",
  "CRYSTALS_KYBER",
  "CRYSTALS_DILITHIUM",
  "FALCON",
  "SPHINCS_PLUS",
] as const;

export const VALID_KEY_SIZES: Record<string, number[]> = {
  RSA: [1024, 2048, 3072, 4096],
  DH: [1024, 2048, 3072, 4096],
  ECC: [160, 224, 256, 384, 521],
  TRIPLE_DES: [112, 168],
  AES: [128, 192, 256],
  CRYSTALS_KYBER: [512, 768, 1024],
  CRYSTALS_DILITHIUM: [2, 3, 5],
  FALCON: [512, 1024],
  SPHINCS_PLUS: [128, 192, 256],
  HYBRID_RSA_PQC: [2048, 3072, 4096],
  HYBRID_ECC_PQC: [256, 384, 521],
};

export const STRATEGIES = [
  "no_action_needed",
  "monitor_and_prepare",
  "scheduled_transition",
  "immediate_hybrid",
  "immediate_replacement",
] as const;

export const LIFETIME_MIN = 1;
export const LIFETIME_MAX = 30;
export const SCALE_MIN = 1;
export const SCALE_MAX = 5;

const URGENCY: Record<string, number> = Object.fromEntries(
  STRATEGIES.map((name, i) => [name, i + 1]),
);

export function urgencyIndex(strategy: string): number {
  const value = URGENCY[strategy];
  if (value === undefined) throw new Error(`unknown strategy ${strategy}`);
  return value;
}

// Badge palette, least urgent (green) to most urgent (red).
export const URGENCY_COLORS = ["#2e9e5b", "#8fb935", "#e0a800", "#e4702e", "#d23f3f"];

export function urgencyColor(strategy: string): string {
  return URGENCY_COLORS[urgencyIndex(strategy) - 1];
}

export function keySizesFor(method: string): number[] {
  return VALID_KEY_SIZES[method] ?? [];
}

const SCALE_FIELDS: RecordField[] = [
  "system_complexity",
  "integration_complexity",
  "data_sensitivity",
];

export interface FieldViolation {
  field: RecordField;
  message: string;
}

export function validateRecord(record: SystemRecord): FieldViolation[] {
  const violations: FieldViolation[] = [];
  if (!(SYSTEM_TYPES as readonly string[]).includes(record.system_type)) {
    violations.push({ field: "system_type", message: `unknown system type ${record.system_type}` });
  }
  if (!(CRYPTO_METHODS as readonly string[]).includes(record.crypto_method)) {
    violations.push({ field: "crypto_method", message: `unknown method ${record.crypto_method}` });
  }
  if (
    !Number.isInteger(record.security_lifetime) ||
    record.security_lifetime < LIFETIME_MIN ||
    record.security_lifetime > LIFETIME_MAX
  ) {
    violations.push({
      field: "security_lifetime",
      message: `security_lifetime must be an integer in [${LIFETIME_MIN}, ${LIFETIME_MAX}]`,
    });
  }
  const sizes = keySizesFor(record.crypto_method);
  if (sizes.length > 0 && !sizes.includes(record.key_size)) {
    violations.push({
      field: "key_size",
      message: `key_size must be one of ${sizes.join(", ")} for ${record.crypto_method}`,
    });
  }
  for (const field of SCALE_FIELDS) {
    const value = record[field] as number;
    if (!Number.isInteger(value) || value < SCALE_MIN || value > SCALE_MAX) {
      violations.push({ field, message: `${field} must be an integer in [1, 5]` });
    }
  }
  return violations;
}

export function isSubmittable(record: SystemRecord): boolean {
  return validateRecord(record).length === 0;
}
