/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_orbit_bodies: (a: number) => number;
export const __wbg_get_orbit_positions: (a: number) => [number, number];
export const __wbg_get_orbit_residual: (a: number) => [number, number];
export const __wbg_get_orbit_times: (a: number) => [number, number];
export const __wbg_orbit_free: (a: number, b: number) => void;
export const __wbg_proof_free: (a: number, b: number) => void;
export const __wbg_set_orbit_bodies: (a: number, b: number) => void;
export const __wbg_set_orbit_positions: (a: number, b: number, c: number) => void;
export const __wbg_set_orbit_residual: (a: number, b: number, c: number) => void;
export const __wbg_set_orbit_times: (a: number, b: number, c: number) => void;
export const candidate: (a: number, b: number) => [number, number, number, number];
export const certify: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const integrate: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const proof_box: (a: number) => [number, number];
export const proof_cause: (a: number) => [number, number];
export const proof_curve: (a: number, b: number) => [number, number, number];
export const proof_image: (a: number) => [number, number];
export const proof_iterations: (a: number) => number;
export const proof_toml: (a: number) => [number, number, number, number];
export const proof_verdict: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
