// JSON schemas of the zonalflow service (mirrors the Python serializers).

export interface FieldSummary {
  id: string;
  name: string;
  mu: number;
  reference_radius: number;
  rotation_rate: number;
  n_max: number;
}

export interface FrozenOrbitPayload {
  e: number;
  omega: number;
  classification: "center" | "saddle";
  hessian_det: number;
  hessian_trace: number;
  impact: boolean;
  gradient_norm: number;
}

export interface GridExtremumPayload {
  e: number;
  omega: number;
  value: number;
  kind: "max" | "min";
}

export interface PhaseMapPayload {
  field: string;
  a_km: number;
  i_circ_deg: number;
  sigma: number;
  n_max: number;
  degrees: number[];
  include_j2sq: boolean;
  include_centering: boolean;
  resolution: number;
  e_impact: number;
  e_max: number;
  k_scale: number;
  e_grid: number[];
  omega_grid: number[];
  values: (number | null)[][];
  mask: number[][];
  extrema: GridExtremumPayload[];
  frozen: FrozenOrbitPayload[];
}

export interface PhaseMapRequest {
  field?: string;
  n_max?: number;
  degrees?: number[];
  a_km?: number;
  altitude_km?: number;
  i_circ_deg: number;
  resolution?: number;
  include_j2sq?: boolean;
  include_centering?: boolean;
  e_max?: number;
  frozen_search?: "axis" | "full" | "none";
}

export interface RampFrame {
  degree: number;
  map: PhaseMapPayload;
}

export function isPhaseMapPayload(value: unknown): value is PhaseMapPayload {
  if (typeof value !== "object" || value === null) return false;
  const v = value as Record<string, unknown>;
  return (
    Array.isArray(v.e_grid) &&
    Array.isArray(v.omega_grid) &&
    Array.isArray(v.values) &&
    Array.isArray(v.frozen) &&
    typeof v.e_impact === "number"
  );
}
