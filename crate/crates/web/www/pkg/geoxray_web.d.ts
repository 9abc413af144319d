/* tslint:disable */
/* eslint-disable */

export class FbpResult {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    phantom(): Image;
    recon(): Image;
    sinogram(): Image;
    readonly rel_error: number;
}

/**
 * Row-major image, row 0 at the bottom (smallest y or first angle).
 */
export class Image {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    data(): Float64Array;
    readonly height: number;
    readonly width: number;
}

/**
 * Radon transform and filtered backprojection of a two-bump phantom on an
 * `n × n` grid with `angles` directions.
 */
export function fbp_demo(n: number, angles: number): FbpResult;

/**
 * Geodesics entering at boundary angle `beta`, `n` directions spread across
 * the inward half plane. Returns `x, y` pairs, one polyline per ray,
 * separated by `NaN, NaN`.
 */
export function geodesic_fan(metric_spec: string, beta: number, n: number, step: number): Float64Array;

/**
 * Fan-beam data `If(β, α)` of the two-bump phantom: width `n_alpha`,
 * height `n_beta`; trapped rays are `NaN`.
 */
export function xray_fan(metric_spec: string, n_beta: number, n_alpha: number, step: number): Image;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_fbpresult_free: (a: number, b: number) => void;
    readonly __wbg_image_free: (a: number, b: number) => void;
    readonly fbp_demo: (a: number, b: number) => [number, number, number];
    readonly fbpresult_phantom: (a: number) => number;
    readonly fbpresult_recon: (a: number) => number;
    readonly fbpresult_rel_error: (a: number) => number;
    readonly fbpresult_sinogram: (a: number) => number;
    readonly geodesic_fan: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly image_data: (a: number) => [number, number];
    readonly image_height: (a: number) => number;
    readonly image_width: (a: number) => number;
    readonly xray_fan: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
