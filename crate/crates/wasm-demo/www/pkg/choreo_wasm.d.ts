/* tslint:disable */
/* eslint-disable */

/**
 * Sampled positions of every body, `[x0, y0, x1, y1, ...]` per sample.
 */
export class Orbit {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    bodies: number;
    positions: Float64Array;
    /**
     * Largest gluing residual (zero for a certified orbit, absent for a
     * plain trajectory).
     */
    get residual(): number | undefined;
    /**
     * Largest gluing residual (zero for a certified orbit, absent for a
     * plain trajectory).
     */
    set residual(value: number | null | undefined);
    times: Float64Array;
}

/**
 * Outcome of one certification run.
 */
export class Proof {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Unfolds the certified segment into the whole periodic orbit.
     */
    curve(per_segment: number): Orbit;
    /**
     * The certificate in its text form.
     */
    toml(): string;
    /**
     * Box `[X]` as `[lo0, hi0, lo1, hi1, ...]`.
     */
    readonly box: Float64Array;
    readonly cause: string | undefined;
    /**
     * Operator image of the last iteration, same layout as `box`.
     */
    readonly image: Float64Array;
    readonly iterations: number;
    readonly verdict: string;
}

/**
 * Published candidate zero for `system`.
 */
export function candidate(system: string): Float64Array;

/**
 * Certifies the zero of `Phi` in the box `params ± delta` with the
 * published method and step sizes.
 */
export function certify(system: string, params: Float64Array, delta: number): Proof;

/**
 * Floating-point trajectory of `E(params)` over `[0, total]`.
 */
export function integrate(system: string, params: Float64Array, total: number, h: number): Orbit;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_orbit_bodies: (a: number) => number;
    readonly __wbg_get_orbit_positions: (a: number) => [number, number];
    readonly __wbg_get_orbit_residual: (a: number) => [number, number];
    readonly __wbg_get_orbit_times: (a: number) => [number, number];
    readonly __wbg_orbit_free: (a: number, b: number) => void;
    readonly __wbg_proof_free: (a: number, b: number) => void;
    readonly __wbg_set_orbit_bodies: (a: number, b: number) => void;
    readonly __wbg_set_orbit_positions: (a: number, b: number, c: number) => void;
    readonly __wbg_set_orbit_residual: (a: number, b: number, c: number) => void;
    readonly __wbg_set_orbit_times: (a: number, b: number, c: number) => void;
    readonly candidate: (a: number, b: number) => [number, number, number, number];
    readonly certify: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly integrate: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly proof_box: (a: number) => [number, number];
    readonly proof_cause: (a: number) => [number, number];
    readonly proof_curve: (a: number, b: number) => [number, number, number];
    readonly proof_image: (a: number) => [number, number];
    readonly proof_iterations: (a: number) => number;
    readonly proof_toml: (a: number) => [number, number, number, number];
    readonly proof_verdict: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
