/* tslint:disable */
/* eslint-disable */

/**
 * One- and two-magnon Bethe states from the standard seeds, with `Λ(u)`
 * placed against the exact spectrum of `t_ξ(u)`.
 */
export function betheStates(n_sites: number, xi: string, u: string): string;

/**
 * Spectra of `H(ξ)`, `H(0)`, `t_ξ(u)` and `t_0(u)` with matching distances.
 */
export function compareSpectra(n_sites: number, xi: string, u: string): string;

/**
 * Identifiers and formulas accepted by [`identity_residual`].
 */
export function identityNames(): string;

export function identityResidual(name: string, n_sites: number, xi: string, u: string, v: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly betheStates: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly compareSpectra: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly identityNames: () => [number, number, number, number];
    readonly identityResidual: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
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
