/* tslint:disable */
/* eslint-disable */

/**
 * Dressed levels next to the exact reflection peaks.
 */
export function dressed(band: number, rabi: number, detuning: number, g: number): string;

/**
 * Coupled TM modes with cutoff at or below `omega_max`.
 */
export function modes(omega_max: number): string;

/**
 * Counts of reflection and transmission peaks over a Rabi-detuning grid.
 */
export function phase_map(band: number, g: number, rabi_max: number, rabi_points: number, detuning_points: number): string;

/**
 * Reflectance and transmittance across a band, plus the located peaks.
 */
export function spectrum(band: number, input: string, rabi: number, detuning: number, g: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dressed: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly modes: (a: number) => [number, number];
    readonly phase_map: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly spectrum: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
